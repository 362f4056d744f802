# Copyright 2026 The spde-excite developers
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""\
Output files of an experiment run.

Each artifact renders itself to bytes (``stream``) and writes under a
destination directory (``write``). Renderings contain no timestamps or
host details: identical inputs give byte-identical files.
"""

import json
import math
from pathlib import Path

import numpy as np
from jinja2 import Environment, PackageLoader

from .utils import format_float, json_float


SWEEP_COLUMNS = ("lambda", "log_energy", "log_energy_ci", "I", "S", "I_eps", "n_effective")
KERNEL_COLUMNS = ("t", "x", "y", "gaussian", "dirichlet", "neumann", "truncation_bound")
UNDEFINED_SLOPE = "undefined (insufficient points)"


def jsonable(value):
    """\
    Recursively convert numpy scalars and arrays into JSON types; non-finite
    floats become None.
    """
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, np.ndarray)):
        return [jsonable(_) for _ in value]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return json_float(value)
    return value


class Artifact:

    BASENAME = None

    def __init__(self, config_hash, seed):
        self.config_hash = config_hash
        self.seed = seed

    @property
    def id(self):
        return self.BASENAME

    def generate(self):
        raise NotImplementedError

    def stream(self):
        yield self.id, self.generate().encode("utf-8")

    def write(self, dest_base):
        out_path = Path(dest_base) / self.id
        out_path.parent.mkdir(parents=True, exist_ok=True)
        with open(out_path, "wb") as f:
            for _, chunk in self.stream():
                f.write(chunk)
        return out_path


class CSVArtifact(Artifact):

    COLUMNS = ()

    def rows(self):
        raise NotImplementedError

    def notes(self):
        return []

    def generate(self):
        lines = [
            f"# config_hash={self.config_hash}",
            f"# seed={self.seed}",
        ]
        lines.extend(f"# {_}" for _ in self.notes())
        lines.append(",".join(self.COLUMNS))
        for row in self.rows():
            lines.append(",".join(_cell(_) for _ in row))
        return "\n".join(lines) + "\n"


def _cell(value):
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format_float(value)


class SweepTable(CSVArtifact):
    """\
    One row per lambda. I, S and I_eps are second moments E|u_t(x)|^2;
    replicas that failed are annotated in the comment header.
    """

    BASENAME = "sweep.csv"
    COLUMNS = SWEEP_COLUMNS

    def __init__(self, config_hash, seed, result):
        super().__init__(config_hash, seed)
        self.result = result

    def rows(self):
        r = self.result
        for i, lam in enumerate(r.lambdas):
            yield (lam, r.log_energy[i], r.log_energy_ci[i], r.inf[i], r.sup[i], r.inf_eps[i], int(r.n_effective[i]))

    def notes(self):
        r = self.result
        notes = []
        for i, lam in enumerate(r.lambdas):
            failed = int(r.failed[i])
            if failed:
                total = failed + int(r.n_effective[i])
                notes.append(f"lambda={format_float(lam)}: {failed} of {total} replicas failed")
        return notes


class KernelTable(CSVArtifact):

    BASENAME = "kernels.csv"
    COLUMNS = KERNEL_COLUMNS

    def __init__(self, config_hash, seed, table):
        super().__init__(config_hash, seed)
        self.table = table

    def rows(self):
        return self.table


class JSONReport(Artifact):

    def __init__(self, config_hash, seed, content):
        super().__init__(config_hash, seed)
        self.content = content

    def generate(self):
        content = dict(self.content)
        content["config_hash"] = self.config_hash
        content["seed"] = self.seed
        return json.dumps(jsonable(content), indent=4, sort_keys=True) + "\n"


class Summary(JSONReport):

    BASENAME = "summary.json"

    @classmethod
    def from_sweep(cls, config_hash, seed, result, extra=None):
        fit = result.fit
        content = {
            "fits": {k: v.as_dict() for k, v in result.fits.items()},
            "dropped": list(result.dropped),
            "failed_replicas": int(np.sum(result.failed)),
        }
        if fit.defined:
            content.update(slope=fit.slope, stderr=fit.stderr, intercept=fit.intercept, window=list(fit.window))
        else:
            content.update(slope=UNDEFINED_SLOPE, stderr=None, intercept=None, window=None)
        content.update(extra or {})
        return cls(config_hash, seed, content)


class ValidationReport(JSONReport):

    BASENAME = "validation.json"


class LogLogPlot(Artifact):
    """\
    log log E against log lambda, with the fitted line over its window.
    """

    BASENAME = "loglog.svg"
    WIDTH = 640
    HEIGHT = 440
    MARGIN = (40, 30, 50, 70)  # top, right, bottom, left

    def __init__(self, config_hash, seed, result, title="excitation index sweep"):
        super().__init__(config_hash, seed)
        self.result = result
        self.title = title

    def _data(self):
        r = self.result
        xs, ys = [], []
        for lam, log_e in zip(r.lambdas, r.log_energy):
            if lam > 0 and log_e > 0 and math.isfinite(log_e):
                xs.append(math.log(lam))
                ys.append(math.log(log_e))
        return xs, ys

    def context(self):
        top, right, bottom, left = self.MARGIN
        frame = {"top": top, "right": self.WIDTH - right, "bottom": self.HEIGHT - bottom, "left": left}
        xs, ys = self._data()
        fit = self.result.fit
        fit_xs = [math.log(_) for _ in fit.window] if fit.defined else []
        fit_ys = [fit.intercept + fit.slope * _ for _ in fit_xs]
        x_lo, x_hi = _span(xs + fit_xs)
        y_lo, y_hi = _span(ys + fit_ys)

        def px(x):
            return round(frame["left"] + (x - x_lo) / (x_hi - x_lo) * (frame["right"] - frame["left"]), 2)

        def py(y):
            return round(frame["bottom"] - (y - y_lo) / (y_hi - y_lo) * (frame["bottom"] - frame["top"]), 2)

        fit_line = None
        if fit.defined:
            fit_line = {"x1": px(fit_xs[0]), "y1": py(fit_ys[0]), "x2": px(fit_xs[1]), "y2": py(fit_ys[1])}
            title = f"{self.title}: slope {fit.slope:.3f}"
        else:
            title = f"{self.title}: slope {UNDEFINED_SLOPE}"
        return {
            "width": self.WIDTH,
            "height": self.HEIGHT,
            "frame": frame,
            "title": title,
            "config_hash": self.config_hash,
            "seed": self.seed,
            "points": [{"x": px(x), "y": py(y)} for x, y in zip(xs, ys)],
            "fit_line": fit_line,
            "xticks": [{"pos": px(_), "label": f"{_:.2f}"} for _ in np.linspace(x_lo, x_hi, 5)],
            "yticks": [{"pos": py(_), "label": f"{_:.2f}"} for _ in np.linspace(y_lo, y_hi, 5)],
        }

    def generate(self):
        env = Environment(loader=PackageLoader("spde_excite", "templates"), autoescape=True)
        return env.get_template("loglog.svg.j2").render(**self.context())


def _span(values):
    if not values:
        return 0.0, 1.0
    lo, hi = min(values), max(values)
    if hi - lo < 1e-12:
        lo, hi = lo - 0.5, hi + 0.5
    pad = 0.05 * (hi - lo)
    return lo - pad, hi + pad


class RunDirectory:
    """\
    Collects the artifacts of one run and writes them under ``out``.
    """

    def __init__(self, out, config_hash, seed):
        self.out = Path(out)
        self.config_hash = config_hash
        self.seed = seed
        self.artifacts = {}

    def add(self, cls, *args, **kwargs):
        artifact = cls(self.config_hash, self.seed, *args, **kwargs)
        self.artifacts[artifact.id] = artifact
        return artifact

    def add_summary(self, result, extra=None):
        artifact = Summary.from_sweep(self.config_hash, self.seed, result, extra=extra)
        self.artifacts[artifact.id] = artifact
        return artifact

    def write(self):
        self.out.mkdir(parents=True, exist_ok=True)
        return [a.write(self.out) for a in self.artifacts.values()]
