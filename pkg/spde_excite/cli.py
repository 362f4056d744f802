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

import sys
import warnings

import click

from .config import ConfigError, parse_config
from .experiments import RunFailure, run_sweep, run_tabulate, run_validation
from .quadrature import QuadratureError
from .sim import NonFiniteStateError
from ._version import __version__


EXIT_CONFIG = 2
EXIT_CHECK = 3
EXIT_RUNTIME = 4


class KeyValueParamType(click.ParamType):
    name = "key_value"

    def convert(self, value, param, ctx):
        if isinstance(value, tuple):
            return value
        try:
            key, val = value.split("=", 1)
        except (AttributeError, ValueError):
            self.fail(f"{value!r} is not of the form KEY=VALUE", param, ctx)
        return key.strip(), val.strip()


KeyValue = KeyValueParamType()
OPTION_CONFIG = click.option(
    "-c",
    "--config",
    "config_path",
    type=click.Path(exists=True, dir_okay=False),
    help="Experiment config file. Keys it omits take the packaged defaults.",
)
OPTION_SEED = click.option("-s", "--seed", type=int, help="Master seed (overrides the config).")
OPTION_OUT = click.option(
    "-o", "--out", type=click.Path(file_okay=False), help="Output directory (overrides the config)."
)
OPTION_WORKERS = click.option(
    "-w",
    "--workers",
    type=click.IntRange(min=0),
    help="Worker processes; 0 means one per CPU. Defaults to the config, then SPDE_WORKERS.",
)
ARGUMENT_OVERRIDES = click.argument("overrides", nargs=-1, type=KeyValue, metavar="[KEY=VALUE]...")


def load(mode, config_path, overrides, **options):
    overrides = dict(overrides)
    for key, value in options.items():
        if value is not None:
            overrides[key] = str(value)
    text = ""
    if config_path:
        with open(config_path, encoding="utf8") as f:
            text = f.read()
    return parse_config(text, overrides=overrides, mode=mode)


def run_mode(mode, action, config_path, overrides, **options):
    """\
    Parse the config, run ``action`` on it and map failures to exit
    codes. Warnings are echoed to stderr.
    """
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        try:
            cfg = load(mode, config_path, overrides, **options)
            status = action(cfg)
        except ConfigError as exc:
            source = f"{config_path}: " if config_path and exc.line is not None else ""
            click.echo(f"config error ({exc.kind}): {source}{exc}", err=True)
            sys.exit(EXIT_CONFIG)
        except (RunFailure, QuadratureError, NonFiniteStateError, ValueError, OSError) as exc:
            click.echo(f"run failed: {exc}", err=True)
            sys.exit(EXIT_RUNTIME)
        finally:
            seen = set()
            for w in caught:
                message = str(w.message)
                if message not in seen:
                    seen.add(message)
                    click.echo(f"warning: {message}", err=True)
    if status:
        sys.exit(status)


def validation_action(cfg):
    click.echo(f"{cfg.mode}: config {cfg.config_hash}, seed {cfg.seed}", err=True)
    report, passed = run_validation(cfg)
    for check in report["checks"]:
        mark = "ok" if check["passed"] else "FAIL"
        click.echo(f"{mark:4} {check['name']}: {check['value']} (limit {check['threshold']})")
    if passed:
        click.echo(f"all {len(report['checks'])} checks passed")
        return 0
    click.echo(f"{len(report['failures'])} of {len(report['checks'])} checks failed")
    return EXIT_CHECK


def sweep_action(cfg):
    click.echo(f"sweep: config {cfg.config_hash}, seed {cfg.seed}, {len(cfg.lambdas())} lambdas", err=True)
    result = run_sweep(cfg)
    fit = result.fit
    if fit.defined:
        click.echo(f"slope: {fit.slope:.3f} +/- {fit.stderr:.3f} on lambda in [{fit.window[0]:g}, {fit.window[1]:g}]")
    else:
        click.echo("slope: undefined (insufficient points)")
    return 0


def tabulate_action(cfg):
    for path in run_tabulate(cfg):
        click.echo(str(path))
    return 0


@click.group()
@click.version_option(version=__version__)
def cli():
    pass


def validation_command(mode, summary):
    @cli.command(name=mode, help=summary)
    @OPTION_CONFIG
    @OPTION_SEED
    @OPTION_OUT
    @OPTION_WORKERS
    @ARGUMENT_OVERRIDES
    def command(config_path, seed, out, workers, overrides):
        run_mode(mode, validation_action, config_path, overrides, seed=seed, out=out, workers=workers)
    return command


kernels_check = validation_command(
    "kernels-check", "Check heat kernel inequalities, identities and masses; write validation.json."
)
renewal = validation_command(
    "renewal", "Check the renewal solver and its growth exponent; write validation.json."
)
pam_validate = validation_command(
    "pam-validate", "Compare simulated second moments with the exact PAM moment; write validation.json."
)


@cli.command()
@OPTION_CONFIG
@OPTION_SEED
@OPTION_OUT
@OPTION_WORKERS
@click.option(
    "-m", "--method", type=click.Choice(["montecarlo", "moments"]), help="Estimator (overrides the config)."
)
@click.option(
    "--synthetic",
    type=float,
    metavar="P",
    help="Replace the simulation by log E = lambda^P to check the fitting pipeline.",
)
@ARGUMENT_OVERRIDES
def sweep(config_path, seed, out, workers, method, synthetic, overrides):
    """\
    Estimate E_t, I_t, S_t and I_eps over a lambda grid and fit the
    excitation index; write sweep.csv, summary.json and loglog.svg.
    """
    run_mode(
        "sweep", sweep_action, config_path, overrides,
        seed=seed, out=out, workers=workers, method=method, synthetic=synthetic,
    )


@cli.command()
@OPTION_CONFIG
@OPTION_OUT
@ARGUMENT_OVERRIDES
def tabulate(config_path, out, overrides):
    """\
    Tabulate the Gaussian, Dirichlet and Neumann kernels on the check
    grid; write kernels.csv.
    """
    run_mode("kernels-check", tabulate_action, config_path, overrides, out=out)


if __name__ == "__main__":
    cli()
