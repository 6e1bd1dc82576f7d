import argparse
import json
import logging
import os
import sys
from typing import Dict, List, Optional

import jsonschema.exceptions
import numpy as np

import objective
import spectral
from cellgeom import build_cell
from kernels import check_admissible, parse_kernel_spec
from moduli import TorusParams, reduce_basis
from quadrature import QuadratureConfig
from svg_conversion import cell_to_svg
from ts_errors import (AdmissibilityError, BadParameterError, ConfigError, MonotonicityViolatedError,
                       TorusSpectraError)
from ts_schema import ReportSpec
from ts_util import deep_update
from verification import SuiteRunner

logging.basicConfig(level=os.environ.get("TORUS_SPECTRA_LOG") or "INFO",
                    format="[%(asctime)s] %(levelname)s - %(name)s: %(message)s")

CONFIG_ENV_NAME = "TORUS_SPECTRA_CONFIG"
DEFAULT_CONFIG_PATH = os.path.join("~", ".torus_spectra", "ts_config.json")
DEFAULT_KERNEL = "gaussian:0.3"
GRAD_TOL = 1e-5
IDENTITY_TOL = 1e-8
PIECE_TOL = 1e-12

EXIT_OK = 0
EXIT_VERIFICATION_FAILED = 1
EXIT_USAGE = 2
EXIT_NUMERICAL = 3

DEFAULT_CONFIG = {
    "REL_TOL": 1e-10,
    "ABS_TOL": 1e-12,
    "MAX_DEPTH": 30,
    "MIN_DEPTH": 3,
    "RULE_ORDER": 7,
    "MAX_TRIANGLES": 2_000_000,
    "MAX_INTERVALS": 500,
    "STRICT_QUADRATURE": False,
    "ENUMERATION_CAP": 10 ** 6,
    "SEED": 7,
    "FD_STEP": objective.FD_STEP,
    "HESSIAN_STEP": objective.HESSIAN_STEP,
    "PATH_STEP": objective.PATH_STEP,
    "SPECTRUM_RADIUS": 4.0,
    "SWEEP_NA": 51,
    "SWEEP_NB": 51,
    "SWEEP_B_MAX": 2.0,
    "TRIALS": 100,
    "Z_SAMPLES": 1001,
    "SVG_SIZE": 480,
}

logger = logging.getLogger("torus_spectra")
report_spec = ReportSpec()


def create_config(test_overrides: dict = None, test_config_path: str = None) -> dict:
    """
    Build the run configuration: the defaults, updated from a JSON config file and then from the overrides.

    The config file is ``test_config_path`` if given, else the path in the TORUS_SPECTRA_CONFIG environment variable,
    else ``~/.torus_spectra/ts_config.json`` when it exists.

    :param test_overrides: A set of overrides to merge on top of the configuration
    :param test_config_path: The path of the config file. Has the highest overriding priority
    :return: The validated configuration
    :raises ConfigError: If the file cannot be read or the merged configuration is invalid
    """
    conf = json.loads(json.dumps(DEFAULT_CONFIG))
    conf_path = test_config_path or os.environ.get(CONFIG_ENV_NAME)
    if conf_path:
        if not os.path.exists(conf_path):
            raise ConfigError(f"Config at path '{conf_path}' not found")
    else:
        conf_path = os.path.expanduser(DEFAULT_CONFIG_PATH)
        if not os.path.exists(conf_path):
            logger.debug(f"Config at path '{conf_path}' not found")
            conf_path = None
    if conf_path:
        logger.info(f"Using config at path '{conf_path}'")
        try:
            with open(conf_path, "r", encoding="utf-8") as config_f:
                file_conf = json.load(config_f)
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigError(f"Could not read config at path '{conf_path}': {e}")
        if not isinstance(file_conf, dict):
            raise ConfigError(f"Config at path '{conf_path}' must hold a JSON object")
        deep_update(conf, file_conf)
    if test_overrides:
        deep_update(conf, test_overrides)
    try:
        report_spec.validate(conf, "RunDefaults")
    except jsonschema.exceptions.ValidationError as e:
        raise ConfigError(f"Invalid configuration: {e.message}")
    return conf


def parse_torus(args) -> TorusParams:
    """Resolve --torus or --basis into a point of U."""
    if args.torus and args.basis:
        raise BadParameterError("Give either --torus or --basis, not both")
    if args.torus:
        return TorusParams.parse(args.torus)
    if args.basis:
        try:
            entries = [float(x) for x in args.basis.split(",")]
        except ValueError:
            raise BadParameterError(f"--basis must be four numbers, got '{args.basis}'")
        if len(entries) != 4:
            raise BadParameterError(f"--basis must be four numbers, got '{args.basis}'")
        return reduce_basis(np.array(entries).reshape(2, 2)).params
    raise BadParameterError("This command needs --torus a,b or --basis m11,m12,m21,m22")


def _positive(value, flag: str):
    if value is not None and not value > 0:
        raise BadParameterError(f"{flag} must be positive, got {value}")
    return value


def _json(report: dict, schema_name: str) -> str:
    report_spec.validate(report, schema_name)
    return json.dumps(report, indent=2) + "\n"


def cmd_norms(args, conf: dict, cfg: QuadratureConfig):
    p = parse_torus(args)
    kernel = parse_kernel_spec(args.kernel)
    admissibility = check_admissible(kernel, p, cfg)
    report = {
        "params": p.to_dict(),
        "kernel": kernel.label,
        "operator_norm": objective.J(p, kernel, cfg),
        "hs_norm": admissibility.sq_integral,
        "gamma0": spectral.operator_norm(p, kernel, cfg),
    }
    return _json(report, "NormsReport"), EXIT_OK


def cmd_spectrum(args, conf: dict, cfg: QuadratureConfig):
    p = parse_torus(args)
    kernel = parse_kernel_spec(args.kernel)
    radius = _positive(args.radius, "--radius") or conf["SPECTRUM_RADIUS"]
    report = spectral.spectrum(p, kernel, radius, cfg, cap=conf["ENUMERATION_CAP"], logger=logger.getChild("spectrum"))
    code = EXIT_OK if report.dominance_ok and report.symmetry_ok else EXIT_VERIFICATION_FAILED
    return _json(report.to_dict(), "SpectrumReport"), code


def cmd_sweep(args, conf: dict, cfg: QuadratureConfig):
    kernel = parse_kernel_spec(args.kernel)
    na = args.na or conf["SWEEP_NA"]
    nb = args.nb or conf["SWEEP_NB"]
    b_max = args.bmax or conf["SWEEP_B_MAX"]
    result = objective.grid_sweep(kernel, cfg, na, nb, b_max, logger=logger.getChild("sweep"))
    a, b, value = result.argmax
    if args.format == "json":
        report = {"kernel": result.kernel, "na": na, "nb": nb, "b_max": b_max,
                  "rows": [list(row) for row in result.rows], "argmax": {"a": a, "b": b, "J": value}}
        return _json(report, "SweepReport"), EXIT_OK
    return result.to_csv() + f"# argmax a={a!r} b={b!r} J={value!r}\n", EXIT_OK


def cmd_optimize(args, conf: dict, cfg: QuadratureConfig):
    start = parse_torus(args)
    kernel = parse_kernel_spec(args.kernel)
    step = _positive(args.step, "--step") or conf["PATH_STEP"]
    result = objective.optimize_path(start, kernel, cfg, step, logger=logger.getChild("optimize"))
    return _json(result.to_dict(), "PathResult"), EXIT_OK


def cmd_grad_check(args, conf: dict, cfg: QuadratureConfig):
    p = parse_torus(args)
    kernel = parse_kernel_spec(args.kernel)
    step = _positive(args.step, "--step") or conf["FD_STEP"]
    report = objective.grad_check(p, kernel, cfg, step)
    if report.agreement >= GRAD_TOL:
        logger.error(f"Closed-form and finite-difference gradients disagree by {report.agreement:.3e}")
        return _json(report.to_dict(), "GradReport"), EXIT_VERIFICATION_FAILED
    return _json(report.to_dict(), "GradReport"), EXIT_OK


def cmd_hessian(args, conf: dict, cfg: QuadratureConfig):
    p = parse_torus(args)
    kernel = parse_kernel_spec(args.kernel)
    step = _positive(args.step, "--step") or conf["HESSIAN_STEP"]
    report = objective.hessian_fd(p, kernel, cfg, step)
    return _json(report.to_dict(), "HessianReport"), EXIT_OK


def cmd_verify_claims(args, conf: dict, cfg: QuadratureConfig):
    p = parse_torus(args)
    kernel = parse_kernel_spec(args.kernel)
    z_samples = args.z_samples or conf["Z_SAMPLES"]
    claims = objective.claim_check(p, z_samples)
    pieces = objective.transformed_integrals(p, kernel, cfg)
    ok = (claims.ok and pieces.identity_residual <= IDENTITY_TOL
          and min(pieces.piece_one, pieces.piece_two) >= -PIECE_TOL)
    lemma = None
    if p.a == 0.5:
        lemma = objective.lemma_jb_inequality(p, z_samples, kernel, cfg)
        ok = ok and lemma.inequality_ok and lemma.K2_residual <= IDENTITY_TOL
    if not ok:
        logger.error(f"Claim verification failed at ({p.a!r}, {p.b!r})")
    report = {
        "claims": claims.to_dict(),
        "pieces": pieces.to_dict(),
        "lemma_jb": lemma.to_dict() if lemma else None,
        "ok": ok,
    }
    return _json(report, "VerifyClaimsReport"), EXIT_OK if ok else EXIT_VERIFICATION_FAILED


def cmd_moment_verify(args, conf: dict, cfg: QuadratureConfig):
    trials = args.trials or conf["TRIALS"]
    _positive(trials, "--trials")
    runner = SuiteRunner(conf["SEED"], cfg, logger=logger.getChild("moment-verify"))
    records, summaries = runner.execute(trials)
    lines = []
    for record in records:
        record_dict = record.to_dict()
        report_spec.validate(record_dict, "TrialRecord")
        lines.append(json.dumps(record_dict))
    for summary in summaries.values():
        summary_dict = summary.to_dict()
        report_spec.validate(summary_dict, "SuiteSummary")
        lines.append(json.dumps(summary_dict))
    ok = all(summary.ok for summary in summaries.values())
    return "\n".join(lines) + "\n", EXIT_OK if ok else EXIT_VERIFICATION_FAILED


def cmd_voronoi_svg(args, conf: dict, cfg: QuadratureConfig):
    p = parse_torus(args)
    size = args.size or conf["SVG_SIZE"]
    _positive(size, "--size")
    return cell_to_svg(build_cell(p), size), EXIT_OK


COMMANDS: Dict[str, tuple] = {
    "norms": (cmd_norms, ("json",), "Operator and Hilbert-Schmidt norms on one torus"),
    "spectrum": (cmd_spectrum, ("json",), "Eigenvalues for dual vectors inside a radius"),
    "sweep": (cmd_sweep, ("csv", "json"), "Evaluate J on a grid of the moduli space"),
    "optimize": (cmd_optimize, ("json",), "Follow the rearrangement path to the equilateral torus"),
    "grad-check": (cmd_grad_check, ("json",), "Compare the closed-form gradient with finite differences"),
    "hessian": (cmd_hessian, ("json",), "Finite-difference Hessian of J"),
    "verify-claims": (cmd_verify_claims, ("json",), "Check the inequalities behind the sign of the gradient"),
    "moment-verify": (cmd_moment_verify, ("json",), "Run the randomized moment-inequality suites"),
    "voronoi-svg": (cmd_voronoi_svg, ("svg",), "Draw the Voronoi cell with its incircle and circumcircle"),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--torus", dest="torus", help="The torus as 'a,b'")
    common.add_argument("--basis", dest="basis", help="A lattice basis as 'm11,m12,m21,m22' (columns are generators)")
    common.add_argument("--kernel", dest="kernel", default=DEFAULT_KERNEL, help="The kernel spec, e.g. gaussian:0.3")
    common.add_argument("--rel-tol", dest="rel_tol", type=float, help="Relative quadrature tolerance")
    common.add_argument("--abs-tol", dest="abs_tol", type=float, help="Absolute quadrature tolerance")
    common.add_argument("--max-depth", dest="max_depth", type=int, help="Maximum subdivision depth")
    common.add_argument("--seed", dest="seed", type=int, help="The random seed")
    common.add_argument("--out", dest="out", help="Write the output to this path instead of stdout")
    common.add_argument("--format", dest="format", choices=["json", "csv", "svg"], help="The output format")
    common.add_argument("--config", dest="config", help="The path of a JSON config file")

    parser = argparse.ArgumentParser(description="Spectra of isotropic integral operators on flat tori",
                                     add_help=True)
    sub = parser.add_subparsers(dest="command", required=True)
    parsers = {}
    for name, (_, _, help_text) in COMMANDS.items():
        parsers[name] = sub.add_parser(name, parents=[common], help=help_text)
    parsers["spectrum"].add_argument("--radius", dest="radius", type=float, help="The dual-vector radius")
    parsers["sweep"].add_argument("--na", dest="na", type=int, help="Grid nodes along a")
    parsers["sweep"].add_argument("--nb", dest="nb", type=int, help="Grid nodes along b")
    parsers["sweep"].add_argument("--bmax", dest="bmax", type=float, help="Upper end of b")
    for name in ("optimize", "grad-check", "hessian"):
        parsers[name].add_argument("--step", dest="step", type=float, help="The step size")
    parsers["verify-claims"].add_argument("--z-samples", dest="z_samples", type=int, help="Samples of z")
    parsers["moment-verify"].add_argument("--trials", dest="trials", type=int, help="Trials per suite")
    parsers["voronoi-svg"].add_argument("--size", dest="size", type=int, help="Canvas size in pixels")
    return parser


def _flag_overrides(args) -> dict:
    overrides = {}
    for flag, key in (("rel_tol", "REL_TOL"), ("abs_tol", "ABS_TOL"), ("max_depth", "MAX_DEPTH"), ("seed", "SEED")):
        value = getattr(args, flag)
        if value is not None:
            overrides[key] = value
    return overrides


def _write(text: str, out: Optional[str]):
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as out_f:
            out_f.write(text)
    else:
        sys.stdout.write(text)


def main(argv: List[str] = None, test_overrides: dict = None) -> int:
    """
    Run one command.

    :param argv: (optional) The arguments, defaulting to sys.argv[1:]
    :param test_overrides: (optional) Configuration overrides applied before the command-line flags
    :return: 0 on success, 1 on a failed verification, 2 on invalid input, 3 on a numerical failure
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code
    func, formats, _ = COMMANDS[args.command]
    try:
        if args.format and args.format not in formats:
            raise BadParameterError(f"'{args.command}' writes {'/'.join(formats)}, not {args.format}")
        args.format = args.format or formats[0]
        overrides = deep_update(dict(test_overrides or {}), _flag_overrides(args))
        conf = create_config(overrides, args.config)
        cfg = QuadratureConfig.from_mapping(conf)
        logger.info(f"Running '{args.command}'...")
        text, code = func(args, conf, cfg)
    except (BadParameterError, AdmissibilityError) as e:
        logger.error(f"{type(e).__name__}: {e}")
        return EXIT_USAGE
    except MonotonicityViolatedError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return EXIT_VERIFICATION_FAILED
    except TorusSpectraError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return EXIT_NUMERICAL
    except jsonschema.exceptions.ValidationError as e:
        logger.error(f"Report failed schema validation: {e.message}")
        return EXIT_NUMERICAL
    except ValueError as e:
        logger.error(f"Invalid environment: {e}")
        return EXIT_USAGE
    _write(text, args.out)
    logger.info(f"Finished '{args.command}' with exit code {code}")
    return code


if __name__ == '__main__':
    sys.exit(main())
