"""Command-line front-end: special-function evaluation, verification, dispersion, identities, tables.

Exit codes: 0 pass, 1 verification failure, 2 usage or configuration error.
Data goes to standard output, diagnostics to standard error.
"""

import argparse
import csv
import json
import sys
from collections.abc import Callable
from pathlib import Path
from typing import Any, Literal, TextIO

from dotenv import dotenv_values
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from .config import settings
from .equations import VAR_COEF_FAMILIES, EquationSpec, Family, ParseMode, build_solution, dispersion
from .errors import ConfigError, DomainError, LaguerreError
from .identities import BlockStatus, run_identity_suite
from .logging_config import get_logger, run_scope, setup_logging
from .metrics import write_metrics
from .numops import Grid1D
from .profiles import TimeOperator
from .residuals import ResidualMode, evaluate_terms, solve_dispersion_numeric, verify
from .specfun import SeriesEvalPolicy, hyper_bessel_w, laguerre_poly, lower_l, mittag_leffler, tricomi_c0

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2

AGREEMENT_RTOL = 1e-9

LogLevel = Literal["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]


def fmt(value: float) -> str:
    return format(value, ".15g")


class RunConfig(BaseModel):
    """Options shared by every command, merged from the config file and flags."""

    model_config = ConfigDict(extra="forbid")

    log_level: LogLevel = Field(default_factory=lambda: settings.log_level.upper())
    log_json: bool = Field(default_factory=lambda: settings.log_json)
    metrics_file: Path | None = None
    max_terms: int = Field(default_factory=lambda: settings.series_max_terms)
    rel_stop: float = Field(default_factory=lambda: settings.series_rel_stop)
    arg_bound: float = Field(default_factory=lambda: settings.series_arg_bound)

    @field_validator("log_level", mode="before")
    @classmethod
    def normalize_level(cls, value: Any) -> Any:
        return value.upper() if isinstance(value, str) else value

    def policy(self) -> SeriesEvalPolicy:
        return SeriesEvalPolicy(max_terms=self.max_terms, rel_stop=self.rel_stop, arg_bound=self.arg_bound)


def _split_floats(value: Any) -> Any:
    if isinstance(value, str):
        return [item for item in value.replace(",", " ").split() if item]
    if isinstance(value, float | int):
        return [value]
    return value


class EvalConfig(RunConfig):
    fn: Literal["c0", "mlf", "hbw", "laguerre_poly", "lower_l"]
    at: list[float] = Field(min_length=1)
    y: list[float] = Field(default_factory=lambda: [1.0])
    alpha: float = 1.0
    beta: float = 1.0
    nu: float = 1.0
    n: int = 0

    @field_validator("at", "y", mode="before")
    @classmethod
    def split_lists(cls, value: Any) -> Any:
        return _split_floats(value)


class EquationConfig(RunConfig):
    eq: Family
    time_op: TimeOperator | None = None
    alpha: float = 0.5
    beta: float = 0.5
    nu: float = 1.0
    n: int = 2
    parse_mode: ParseMode = ParseMode.LITERAL
    k: float
    r: float | None = None

    def equation(self) -> EquationSpec:
        varcoef = self.eq in VAR_COEF_FAMILIES
        if self.r is not None and not varcoef:
            raise DomainError("--r sets b(t) of the variable-coefficient families only; use --force-r otherwise")
        return EquationSpec(
            family=self.eq,
            time_operator=self.time_op,
            alpha=self.alpha,
            beta=self.beta,
            nu=self.nu,
            n=self.n,
            parse_mode=self.parse_mode,
            k=self.k if varcoef else None,
            r=self.r if varcoef else None,
        )


class SolutionConfig(EquationConfig):
    R: float = 1.0
    force_r: float | None = None
    x_min: float = Field(default_factory=lambda: settings.grid_x_min)
    x_max: float = Field(default_factory=lambda: settings.grid_x_max)
    nx: int = Field(default_factory=lambda: settings.grid_nx)
    t_min: float = Field(default_factory=lambda: settings.grid_t_min)
    t_max: float = Field(default_factory=lambda: settings.grid_t_max)
    nt: int = Field(default_factory=lambda: settings.grid_nt)
    mode: ResidualMode = ResidualMode.EXACT_TIME

    def grids(self) -> tuple[Grid1D, Grid1D]:
        return Grid1D(start=self.x_min, stop=self.x_max, count=self.nx), Grid1D(
            start=self.t_min, stop=self.t_max, count=self.nt
        )


class VerifyConfig(SolutionConfig):
    tol: float | None = Field(default=None, gt=0.0)


class TableConfig(SolutionConfig):
    out: str = "-"


class DispersionConfig(EquationConfig):
    pass


class IdentitiesConfig(RunConfig):
    format: Literal["text", "json"] = "text"
    golden: Path | None = None
    update_golden: bool = False

    @model_validator(mode="after")
    def golden_dir_for_update(self) -> "IdentitiesConfig":
        if self.update_golden and self.golden is None:
            raise ValueError("--update-golden needs --golden DIR")
        return self


class DispersionCheck(BaseModel):
    closed_form: float
    numeric: float
    agree: bool
    residual_parse: ParseMode | None = None
    numeric_own_parse: float | None = None


def _agree(a: float, b: float) -> bool:
    return abs(a - b) <= AGREEMENT_RTOL * max(1.0, abs(a), abs(b))


def cmd_eval(config: EvalConfig, out: TextIO) -> int:
    policy = config.policy()
    writer = csv.writer(out, lineterminator="\n")
    if config.fn == "laguerre_poly":
        writer.writerow(["x", "y", "value"])
        for x in config.at:
            for y in config.y:
                writer.writerow([fmt(x), fmt(y), fmt(laguerre_poly(config.n, x, y))])
        return EXIT_OK

    evaluate: Callable[[float], float]
    match config.fn:
        case "c0":
            evaluate = lambda x: tricomi_c0(x, policy)  # noqa: E731
        case "mlf":
            evaluate = lambda x: mittag_leffler(config.alpha, x, policy)  # noqa: E731
        case "hbw":
            evaluate = lambda x: hyper_bessel_w(config.alpha, config.beta, config.nu, x, policy)  # noqa: E731
        case _:
            evaluate = lambda x: lower_l(config.n, x)  # noqa: E731
    writer.writerow(["arg", "value"])
    for x in config.at:
        writer.writerow([fmt(x), fmt(evaluate(x))])
    return EXIT_OK


def cmd_verify(config: VerifyConfig, out: TextIO) -> int:
    eq = config.equation()
    ansatz = build_solution(eq, config.R, config.k, config.force_r)
    grid_x, grid_t = config.grids()
    report = verify(eq, ansatz, grid_x, grid_t, config.tol, config.mode, config.policy())
    out.write(report.to_json() + "\n")
    return EXIT_OK if report.passed else EXIT_FAILED


def cmd_dispersion(config: DispersionConfig, out: TextIO) -> int:
    eq = config.equation()
    policy = config.policy()
    result: dict[str, Any] = {"equation": str(eq.family), "k": config.k}
    if eq.family is Family.BURGERS_POWER_N:
        # the displayed equation (literal parse) arbitrates both closed forms
        literal = eq.model_copy(update={"parse_mode": ParseMode.LITERAL})
        numeric = solve_dispersion_numeric(literal, config.k, policy)
        checks: dict[ParseMode, DispersionCheck] = {}
        for mode in ParseMode:
            variant = eq.model_copy(update={"parse_mode": mode})
            closed = dispersion(variant, config.k)
            checks[mode] = DispersionCheck(
                closed_form=closed,
                numeric=numeric,
                agree=_agree(closed, numeric),
                residual_parse=ParseMode.LITERAL,
                numeric_own_parse=solve_dispersion_numeric(variant, config.k, policy),
            )
        result["n"] = eq.n
        result.update({str(mode): check.model_dump(mode="json") for mode, check in checks.items()})
        agree = checks[eq.parse_mode].agree
    else:
        closed = dispersion(eq, config.k)
        numeric = solve_dispersion_numeric(eq, config.k, policy)
        check = DispersionCheck(closed_form=closed, numeric=numeric, agree=_agree(closed, numeric))
        result.update(check.model_dump(mode="json", exclude_none=True))
        agree = check.agree
    out.write(json.dumps(result) + "\n")
    return EXIT_OK if agree else EXIT_FAILED


def cmd_identities(config: IdentitiesConfig, out: TextIO) -> int:
    report = run_identity_suite(config.golden, config.update_golden)
    out.write((report.model_dump_json() if config.format == "json" else report.to_text()) + "\n")
    return EXIT_FAILED if report.status is BlockStatus.FAIL else EXIT_OK


def table_rows(config: TableConfig) -> list[list[str]]:
    """x, t, u, residual rows of the table; residual is empty at unusable nodes."""
    eq = config.equation()
    ansatz = build_solution(eq, config.R, config.k, config.force_r)
    grid_x, grid_t = config.grids()
    terms = evaluate_terms(eq, ansatz, grid_x, grid_t, config.mode, config.policy())
    total, usable = terms.total(), terms.usable
    rows = [["x", "t", "u", "residual"]]
    for i, x in enumerate(grid_x.nodes):
        for j, t in enumerate(grid_t.nodes):
            value = fmt(total[i, j]) if usable[i, j] else ""
            rows.append([fmt(x), fmt(t), fmt(terms.u[i, j]), value])
    return rows


def cmd_table(config: TableConfig, out: TextIO) -> int:
    rows = table_rows(config)
    if config.out == "-":
        csv.writer(out, lineterminator="\n").writerows(rows)
    else:
        with open(config.out, "w", newline="") as handle:
            csv.writer(handle, lineterminator="\n").writerows(rows)
        logger.info("Table written", path=config.out)
    return EXIT_OK


COMMANDS: dict[str, tuple[type[RunConfig], Callable[[Any, TextIO], int]]] = {
    "eval": (EvalConfig, cmd_eval),
    "verify": (VerifyConfig, cmd_verify),
    "dispersion": (DispersionConfig, cmd_dispersion),
    "identities": (IdentitiesConfig, cmd_identities),
    "table": (TableConfig, cmd_table),
}


def _common_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    p.add_argument("--config", help="Flat key=value file mirroring the flags (flags override it).")
    p.add_argument("--log-level", dest="log_level", help="Logging level (default: WARNING).")
    p.add_argument("--log-json", dest="log_json", action="store_true", help="Emit JSON log lines.")
    p.add_argument("--metrics-file", dest="metrics_file", help="Write Prometheus metrics here after the run.")
    p.add_argument("--max-terms", dest="max_terms", type=int, help="Series truncation cap (default: 64).")
    p.add_argument("--rel-stop", dest="rel_stop", type=float, help="Relative stopping threshold (default: 1e-16).")
    p.add_argument("--arg-bound", dest="arg_bound", type=float, help="Largest accepted |argument| (default: 30).")
    return p


def _equation_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    p.add_argument("--eq", help=f"Equation family: {', '.join(f.value for f in Family)}.")
    p.add_argument("--time-op", dest="time_op", help="Time operator of the general families.")
    p.add_argument("--alpha", type=float, help="Order alpha of fractional operators.")
    p.add_argument("--beta", type=float, help="Hyper-Bessel beta.")
    p.add_argument("--nu", type=float, help="Hyper-Bessel nu.")
    p.add_argument("--n", type=int, help="Power of the power-n family.")
    p.add_argument("--parse-mode", dest="parse_mode", help="Power-n reading: literal or paper_condition.")
    p.add_argument("--k", type=float, help="Wave number.")
    p.add_argument("--r", type=float, help="Eigenvalue of b(t) for the variable-coefficient families.")
    return p


def _solution_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    p.add_argument("--R", type=float, help="Amplitude (default: 1).")
    p.add_argument("--force-r", dest="force_r", type=float, help="Override the dispersion relation.")
    p.add_argument("--mode", help="Residual mode: exact-time or fd.")
    grid_options = (("x-min", float), ("x-max", float), ("nx", int), ("t-min", float), ("t-max", float), ("nt", int))
    for name, kind in grid_options:
        p.add_argument(f"--{name}", dest=name.replace("-", "_"), type=kind)
    return p


def build_parser() -> argparse.ArgumentParser:
    common, equation, solution = _common_parser(), _equation_parser(), _solution_parser()
    parser = argparse.ArgumentParser(
        prog="laguerre-burgers",
        description="Exact solutions of Burgers-like equations with Laguerre and fractional time derivatives.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser(
        "eval", parents=[common], argument_default=argparse.SUPPRESS, help="Evaluate a special function."
    )
    p.add_argument("--fn", help="c0, mlf, hbw, laguerre_poly or lower_l.")
    p.add_argument("--at", nargs="+", type=float, help="Arguments (x for laguerre_poly).")
    p.add_argument("--y", nargs="+", type=float, help="Second variable of laguerre_poly (default: 1).")
    p.add_argument("--alpha", type=float)
    p.add_argument("--beta", type=float)
    p.add_argument("--nu", type=float)
    p.add_argument("--n", type=int, help="Degree of laguerre_poly or lower_l.")

    sub.add_parser(
        "verify",
        parents=[common, equation, solution],
        argument_default=argparse.SUPPRESS,
        help="Verify an exact solution.",
    ).add_argument("--tol", type=float, help="Tolerance on the normalized residual.")
    sub.add_parser(
        "dispersion",
        parents=[common, equation],
        argument_default=argparse.SUPPRESS,
        help="Closed-form and numeric dispersion relation.",
    )
    p = sub.add_parser(
        "identities", parents=[common], argument_default=argparse.SUPPRESS, help="Run the identity suite."
    )
    p.add_argument("--format", choices=["text", "json"])
    p.add_argument("--golden", help="Directory of stored operator images to compare against.")
    p.add_argument("--update-golden", dest="update_golden", action="store_true", help="Rewrite the stored images.")
    sub.add_parser(
        "table", parents=[common, equation, solution], argument_default=argparse.SUPPRESS, help="Export x,t,u,residual."
    ).add_argument("--out", help="CSV path, - for standard output (default).")
    return parser


def read_config_file(path: str | None) -> dict[str, Any]:
    if path is None:
        return {}
    if not Path(path).is_file():
        raise ConfigError(f"config file not found: {path}")
    values = dotenv_values(path)
    return {key.replace("-", "_"): value for key, value in values.items() if value is not None}


def main(argv: list[str] | None = None, out: TextIO | None = None) -> int:
    out = out or sys.stdout
    args = vars(build_parser().parse_args(argv))
    command = args.pop("command")
    config_model, handler = COMMANDS[command]
    try:
        options = {**read_config_file(args.pop("config", None)), **args}
        config = config_model.model_validate(options)
    except (ValidationError, LaguerreError) as e:
        print(f"error: invalid configuration: {e}", file=sys.stderr)
        return EXIT_USAGE

    setup_logging(config.log_level, config.log_json)
    with run_scope():
        try:
            logger.debug("Running command", command=command)
            return handler(config, out)
        except (ValidationError, LaguerreError) as e:
            logger.error("Command failed", command=command, error=str(e))
            print(f"error: {e}", file=sys.stderr)
            return EXIT_USAGE
        except OSError as e:
            print(f"error: {e}", file=sys.stderr)
            return EXIT_USAGE
        finally:
            if config.metrics_file is not None:
                write_metrics(config.metrics_file)


if __name__ == "__main__":
    sys.exit(main())
