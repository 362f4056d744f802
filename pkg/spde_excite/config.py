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
Experiment configuration files.

The format is line oriented: ``[section]`` headers, one ``key = value``
per line, ``#`` starts a comment. Every key belongs to exactly one
section. Keys left out of a config take the packaged defaults (see
``data/defaults.ini``), and command line overrides win over both.
"""

import difflib
import math
import os
import re
import warnings

from .defaults import defaults_text
from .model import (
    Bump, Flat, KernelParams, Linear, RenewalSpec, SimConfig, SinePerturbed, Table,
    cfl_dt, get_bc,
)
from .model.sim_config import WINDOW_BOUND
from .utils import geometric_grid, short_hash


MODES = ("kernels-check", "renewal", "pam-validate", "sweep")
SECTIONS = ("run", "kernel", "sim", "sweep", "renewal", "pam", "check")
MODE_PREFIX = "mode:"

# keys excluded from the config hash: they do not affect results
NON_RESULT_KEYS = frozenset({"out", "workers", "seed", "mode"})

REQUIRED = {
    "sweep": ("lambda_min", "lambda_max"),
}

SECTION_RE = re.compile(r"^\[\s*([A-Za-z0-9_:-]+)\s*\]$")
ENTRY_RE = re.compile(r"^([A-Za-z_][A-Za-z0-9_]*)\s*=\s*(.*)$")


class ConfigError(ValueError):
    """\
    Invalid experiment configuration.

    ``kind`` is one of "syntax", "unknown-key", "missing-key" or
    "constraint"; ``line`` is the 1-based line of the offending entry, or
    None when the value did not come from the config file.
    """

    def __init__(self, message, key=None, line=None, kind="constraint"):
        self.key = key
        self.line = line
        self.kind = kind
        where = f"line {line}: " if line is not None else ""
        super().__init__(f"{where}{message}")


# value converters

def _float(text):
    value = float(text)
    if not math.isfinite(value):
        raise ValueError(f"{text!r} is not a finite number")
    return value


def _int(text):
    return int(text)


def _str(text):
    return text


def _choice(*options):
    def convert(text):
        value = text.lower()
        if value not in options:
            raise ValueError(f"{text!r} is not one of {', '.join(options)}")
        return value
    return convert


def _auto(convert):
    def wrapped(text):
        return None if text.lower() == "auto" else convert(text)
    return wrapped


def _optional(convert):
    def wrapped(text):
        return None if text.lower() == "none" else convert(text)
    return wrapped


def _float_list(text):
    values = [_float(_) for _ in text.split(",") if _.strip()]
    if not values:
        raise ValueError("empty list")
    return tuple(values)


def _table(text):
    points, values = [], []
    for item in text.split(","):
        if not item.strip():
            continue
        try:
            x, v = item.split(":")
        except ValueError:
            raise ValueError(f"table entry {item.strip()!r} is not of the form x:value")
        points.append(_float(x))
        values.append(_float(v))
    return tuple(points), tuple(values)


KEYS = {
    # [run]
    "mode": ("run", _choice(*MODES)),
    "replicas": ("run", _int),
    "seed": ("run", _int),
    "out": ("run", _str),
    "workers": ("run", _optional(_int)),
    "batch_size": ("run", _int),
    "method": ("run", _choice("montecarlo", "moments")),
    # [kernel]
    "L": ("kernel", _float),
    "nu": ("kernel", _auto(_float)),
    "tol": ("kernel", _float),
    "images": ("kernel", _auto(_int)),
    # [sim]
    "bc": ("sim", _choice("dirichlet", "neumann")),
    "sigma": ("sim", _choice("linear", "sine")),
    "sigma_c": ("sim", _float),
    "sigma_delta": ("sim", _float),
    "u0": ("sim", _choice("bump", "flat", "table")),
    "u0_center": ("sim", _float),
    "u0_half_width": ("sim", _float),
    "u0_height": ("sim", _float),
    "u0_table": ("sim", _optional(_table)),
    "nx": ("sim", _int),
    "dt": ("sim", _auto(_float)),
    "t_end": ("sim", _auto(_float)),
    "t_obs": ("sim", _float),
    # [sweep]
    "lambda_min": ("sweep", _float),
    "lambda_max": ("sweep", _float),
    "lambda_count": ("sweep", _int),
    "epsilon": ("sweep", _auto(_float)),
    "synthetic": ("sweep", _optional(_float)),
    # [renewal]
    "a": ("renewal", _float),
    "b": ("renewal", _float),
    "k_min": ("renewal", _float),
    "k_max": ("renewal", _float),
    "k_count": ("renewal", _int),
    "horizon": ("renewal", _float),
    "steps": ("renewal", _int),
    "t_eval": ("renewal", _float),
    # [pam]
    "pam_lambdas": ("pam", _float_list),
    "pam_x": ("pam", _float),
    "pam_t": ("pam", _float),
    # [check]
    "check_times": ("check", _float_list),
    "check_points": ("check", _int),
    "check_epsilon": ("check", _float),
    "ct_horizon": ("check", _float),
}


def read_entries(text, allow_mode_sections=False):
    """\
    Tokenize config text into ``(section, key, raw_value, line)`` tuples.

    Only the syntax and the key names are checked here.
    """
    entries = []
    seen = {}
    section = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = SECTION_RE.match(line)
        if m:
            section = m.group(1)
            known = section in SECTIONS or (
                allow_mode_sections and section.startswith(MODE_PREFIX)
                and section[len(MODE_PREFIX):] in MODES
            )
            if not known:
                raise ConfigError(
                    f"unknown section [{section}]; expected one of {', '.join(SECTIONS)}",
                    line=lineno, kind="syntax"
                )
            continue
        m = ENTRY_RE.match(line)
        if not m:
            raise ConfigError(f"expected 'key = value', got {raw.strip()!r}", line=lineno, kind="syntax")
        key, value = m.group(1), m.group(2).strip()
        if section is None:
            raise ConfigError(f"key {key!r} appears before any [section] header", key=key, line=lineno, kind="syntax")
        if key not in KEYS:
            raise ConfigError(_unknown_key_message(key), key=key, line=lineno, kind="unknown-key")
        owner = KEYS[key][0]
        if not section.startswith(MODE_PREFIX) and section != owner:
            raise ConfigError(
                f"key {key!r} belongs to section [{owner}], not [{section}]",
                key=key, line=lineno, kind="syntax"
            )
        if (section, key) in seen:
            raise ConfigError(
                f"duplicate key {key!r} (first set on line {seen[(section, key)]})",
                key=key, line=lineno, kind="syntax"
            )
        seen[(section, key)] = lineno
        if value == "":
            raise ConfigError(f"key {key!r} has no value", key=key, line=lineno, kind="syntax")
        entries.append((section, key, value, lineno))
    return entries


def _unknown_key_message(key):
    message = f"unknown key {key!r}"
    matches = difflib.get_close_matches(key, KEYS, n=1, cutoff=0.6)
    if not matches:
        lowered = {_.lower(): _ for _ in KEYS}
        matches = difflib.get_close_matches(key.lower(), lowered, n=1, cutoff=0.6)
        matches = [lowered[_] for _ in matches]
    if not matches:
        # a prefix of a key, e.g. "lamda" for "lambda_min"
        stems = {_.split("_")[0]: _ for _ in sorted(KEYS, reverse=True) if "_" in _}
        matches = [stems[_] for _ in difflib.get_close_matches(key, stems, n=1, cutoff=0.75)]
    if matches:
        message += f"; did you mean {matches[0]!r}?"
    return message


def _load_defaults(mode):
    raw = {}
    for section, key, value, _ in read_entries(defaults_text(), allow_mode_sections=True):
        if section.startswith(MODE_PREFIX):
            if section[len(MODE_PREFIX):] == mode:
                raw[key] = value
        else:
            raw.setdefault(key, value)
    return raw


class ExperimentConfig:
    """\
    Fully resolved and validated experiment configuration.

    ``values`` maps every known key to its converted value (``None`` for
    "auto" and "none"), ``lines`` maps the keys set in the config file to
    their line numbers.
    """

    def __init__(self, mode, values, lines=None):
        self.mode = mode
        self.values = dict(values)
        self.lines = dict(lines or {})
        self.warnings = []

    def __getitem__(self, key):
        return self.values[key]

    def __repr__(self):
        return f"<ExperimentConfig {self.mode} {self.config_hash}>"

    @property
    def seed(self):
        return self.values["seed"]

    @property
    def out(self):
        return self.values["out"]

    @property
    def workers(self):
        return self.values["workers"]

    @property
    def replicas(self):
        return self.values["replicas"]

    @property
    def nu(self):
        nu = self.values["nu"]
        if nu is None:
            nu = 1.0 if self.mode == "kernels-check" else 0.5
        return nu

    @property
    def epsilon(self):
        eps = self.values["epsilon"]
        return self.values["L"] / 4 if eps is None else eps

    def kernel_params(self):
        return KernelParams(L=self.values["L"], nu=self.nu, images=self.values["images"], tol=self.values["tol"])

    def initial_condition(self):
        v = self.values
        if v["u0"] == "bump":
            return Bump(v["u0_center"], v["u0_half_width"], v["u0_height"])
        if v["u0"] == "flat":
            return Flat(v["u0_height"])
        if v["u0_table"] is None:
            raise ValueError("u0 = table needs u0_table")
        return Table(*v["u0_table"])

    def noise_coefficient(self):
        v = self.values
        if v["sigma"] == "linear":
            return Linear(v["sigma_c"])
        return SinePerturbed(v["sigma_c"], v["sigma_delta"])

    @property
    def t_obs(self):
        return self.values["pam_t"] if self.mode == "pam-validate" else self.values["t_obs"]

    @property
    def dt(self):
        """\
        Configured step, or for "auto" the largest step within the CFL
        bound that divides t_obs evenly.
        """
        dt = self.values["dt"]
        if dt is not None:
            return dt
        bound = cfl_dt(self.kernel_params(), self.values["nx"])
        return self.t_obs / math.ceil(self.t_obs / bound * (1 - 1e-12))

    def sim_config(self, lam=1.0):
        t_end = self.values["t_end"]
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            return SimConfig(
                params=self.kernel_params(),
                bc=get_bc(self.values["bc"]),
                sigma=self.noise_coefficient(),
                u0=self.initial_condition(),
                nx=self.values["nx"],
                dt=self.dt,
                t_end=self.t_obs if t_end is None else t_end,
                lam=lam,
            )

    def lambdas(self):
        v = self.values
        return geometric_grid(v["lambda_min"], v["lambda_max"], v["lambda_count"])

    def ks(self):
        v = self.values
        return geometric_grid(v["k_min"], v["k_max"], v["k_count"])

    def renewal_spec(self, k):
        v = self.values
        return RenewalSpec(a=v["a"], b=v["b"], k=k, T=v["horizon"], n=v["steps"])

    def check_points(self):
        count = self.values["check_points"]
        L = self.values["L"]
        return [L * i / (count - 1) for i in range(count)]

    def canonical(self):
        """\
        Normalised rendering used for hashing: sections in fixed order,
        keys sorted, values in repr form.
        """
        lines = []
        for section in SECTIONS:
            keys = sorted(k for k, (s, _) in KEYS.items() if s == section and k not in NON_RESULT_KEYS)
            lines.append(f"[{section}]")
            lines.extend(f"{k} = {self.values[k]!r}" for k in keys)
        return "\n".join(lines) + "\n"

    @property
    def config_hash(self):
        return short_hash(f"mode = {self.mode}\n" + self.canonical())

    def as_dict(self):
        rval = {"mode": self.mode}
        for section in SECTIONS:
            rval[section] = {
                k: self.values[k] for k, (s, _) in KEYS.items() if s == section and k not in NON_RESULT_KEYS
            }
        return rval


def _check(condition, message, key, lines):
    if not condition:
        raise ConfigError(message, key=key, line=lines.get(key), kind="constraint")


def _validate(cfg):
    v, lines = cfg.values, cfg.lines
    for key in ("replicas", "batch_size", "lambda_count", "k_count", "check_points"):
        _check(v[key] >= 1, f"{key} must be >= 1, got {v[key]}", key, lines)
    _check(v["nx"] >= 1, f"nx must be >= 1, got {v['nx']}", "nx", lines)
    _check(v["check_points"] >= 2, f"check_points must be >= 2, got {v['check_points']}", "check_points", lines)
    _check(v["steps"] >= 2, f"steps must be >= 2, got {v['steps']}", "steps", lines)
    _check(v["workers"] is None or v["workers"] >= 0, f"workers must be >= 0, got {v['workers']}", "workers", lines)
    for key in ("L", "tol", "t_obs", "horizon", "t_eval", "pam_t", "check_epsilon", "ct_horizon", "a"):
        _check(v[key] > 0, f"{key} must be positive, got {v[key]}", key, lines)
    _check(v["b"] > 0, f"b must be positive, got {v['b']}", "b", lines)
    _check(v["nu"] is None or v["nu"] > 0, f"nu must be positive, got {v['nu']}", "nu", lines)
    _check(v["t_eval"] <= v["horizon"], f"t_eval={v['t_eval']} exceeds horizon={v['horizon']}", "t_eval", lines)
    _check(0 < v["k_min"] <= v["k_max"], "need 0 < k_min <= k_max", "k_min", lines)
    _check(all(_ > 0 for _ in v["check_times"]), "check_times must be positive", "check_times", lines)
    _check(all(_ >= 0 for _ in v["pam_lambdas"]), "pam_lambdas must be nonnegative", "pam_lambdas", lines)
    L = v["L"]
    _check(0 <= v["pam_x"] <= L, f"pam_x={v['pam_x']} outside [0, {L}]", "pam_x", lines)
    if cfg.mode == "sweep":
        _check(0 < v["lambda_min"] <= v["lambda_max"], "need 0 < lambda_min <= lambda_max", "lambda_min", lines)
        _check(0 < cfg.epsilon < L / 2, f"epsilon={cfg.epsilon} must lie in (0, {L / 2})", "epsilon", lines)
        if v["method"] == "moments":
            _check(v["sigma"] == "linear", "method = moments needs sigma = linear", "method", lines)
    if cfg.mode not in ("sweep", "pam-validate"):
        return
    params = cfg.kernel_params()
    bound = cfl_dt(params, v["nx"])
    dt = cfg.dt
    _check(
        dt <= bound * (1 + 1e-12),
        f"dt={dt!r} violates nu*dt/dx^2 <= 1/4 for nx={v['nx']}: dt must be <= {bound!r}",
        "dt", lines
    )
    try:
        sim = cfg.sim_config()
        sim.steps_to(cfg.t_obs)
    except ValueError as exc:
        key = "u0" if "bump" in str(exc) or "table" in str(exc) else "t_obs"
        raise ConfigError(str(exc), key=key, line=lines.get(key), kind="constraint")
    top = v["lambda_max"] if cfg.mode == "sweep" else max(v["pam_lambdas"])
    if cfg.mode == "sweep" and v["synthetic"] is not None:
        return
    if top * top * sim.dx > WINDOW_BOUND:
        warnings.warn(
            f"lambda={top} gives lambda^2 * dx = {top * top * sim.dx:.3g} > {WINDOW_BOUND}: "
            f"outside the continuum window for nx={v['nx']}",
            RuntimeWarning
        )


def parse_config(text, overrides=None, mode=None):
    """\
    Parse and validate an experiment config.

    ``overrides`` maps keys to raw string values that win over the file
    (as given on the command line). ``mode`` is the mode requested by the
    caller; a conflicting ``mode`` key in the file is an error.
    """
    overrides = dict(overrides or {})
    entries = read_entries(text)
    raw = {key: value for _, key, value, _ in entries}
    lines = {key: lineno for _, key, _, lineno in entries}
    for key in overrides:
        if key not in KEYS:
            raise ConfigError(_unknown_key_message(key) + " (command line)", key=key, kind="unknown-key")
    file_mode = raw.get("mode", "").lower() or None
    if mode is not None and file_mode is not None and file_mode != mode:
        raise ConfigError(
            f"config is for mode {file_mode!r} but {mode!r} was requested",
            key="mode", line=lines.get("mode"), kind="constraint"
        )
    mode = mode or overrides.get("mode") or file_mode or "sweep"
    if mode not in MODES:
        raise ConfigError(f"unknown mode {mode!r}", key="mode", line=lines.get("mode"), kind="constraint")
    for key in REQUIRED.get(mode, ()):
        if key not in raw and key not in overrides:
            section = KEYS[key][0]
            raise ConfigError(f"missing required key {key!r} in [{section}] for mode {mode}", key=key, kind="missing-key")
    merged = _load_defaults(mode)
    merged.update(raw)
    merged.update(overrides)
    for key in overrides:
        lines.pop(key, None)
    values = {}
    for key, (_, convert) in KEYS.items():
        if key not in merged:
            values[key] = None
            continue
        try:
            values[key] = convert(merged[key])
        except ValueError as exc:
            raise ConfigError(f"invalid value for {key!r}: {exc}", key=key, line=lines.get(key), kind="constraint")
    values["mode"] = mode
    if values["workers"] is None and "SPDE_WORKERS" in os.environ:
        env = os.environ["SPDE_WORKERS"]
        try:
            values["workers"] = int(env)
        except ValueError:
            raise ConfigError(f"SPDE_WORKERS={env!r} is not a nonnegative integer", key="workers", kind="constraint")
    cfg = ExperimentConfig(mode, values, lines)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        _validate(cfg)
    for w in caught:
        cfg.warnings.append(str(w.message))
        warnings.warn(w.message, w.category)
    return cfg


def load_config(path, overrides=None, mode=None):
    with open(path, encoding="utf8") as f:
        return parse_config(f.read(), overrides=overrides, mode=mode)
