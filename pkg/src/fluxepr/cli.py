"""Command-line entry point: ``fluxepr <subcommand> --config PATH ...``.

Exit status is 0 on success, 1 on invalid input and 2 when a numerical
solve fails to converge.
"""

import argparse
import json
import logging
import sys
from dataclasses import replace

from .epr import Nonlinearity, calibrate_resonator_offset, flux_sweep
from .exceptions import ConfigError, ContractError, ConvergenceError
from .fluxonium import calibrate_EJ_EL
from .io import (
    FluxGrid,
    format_compare_csv,
    format_sweep_csv,
    parse_config,
    parse_eigenmode_report,
)
from .lumped import lumped_flux_sweep

log = logging.getLogger("fluxepr")

EXIT_OK, EXIT_INVALID, EXIT_NONCONVERGED = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad usage; 2 is reserved for non-convergence here
    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


def build_parser():
    common = _Parser(add_help=False)
    common.add_argument("--config", required=True, metavar="PATH", help="JSON configuration")
    common.add_argument("--report", metavar="PATH", help="eigenmode CSV (mode,f_ghz,junction,p)")
    common.add_argument("--out", metavar="PATH", help="output file (default: stdout)")
    common.add_argument("--flux", metavar="A:B:N", help="flux grid override, or a single value")
    common.add_argument("--truncation", type=int, metavar="N", help="Fock levels per mode")
    common.add_argument("--nonlinearity", metavar="exact|taylor:N")
    common.add_argument("--jobs", type=int, default=None, help="worker threads for sweeps")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = _Parser(prog="fluxepr", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.required = True
    sub.add_parser("epr-sweep", parents=[common], help="EPR flux sweep to CSV")
    sub.add_parser("lumped-sweep", parents=[common], help="lumped-model flux sweep to CSV")
    sub.add_parser("chi", parents=[common], help="EPR dispersive shift (MHz) at one flux point")
    sub.add_parser("calibrate", parents=[common], help="fit E_J, E_L and the resonator offset")
    sub.add_parser("compare", parents=[common], help="EPR and lumped sweeps side by side")
    return parser


def _read(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from exc


class _Run:
    """Configuration plus command-line overrides."""

    def __init__(self, args):
        self.args = args
        self.config = parse_config(_read(args.config))
        self.modes = self.config.modes
        if args.report:
            truncation = args.truncation or 30
            self.modes = parse_eigenmode_report(_read(args.report)).to_modes(truncation)
        if args.truncation is not None and self.modes:
            if args.truncation < 2:
                raise ConfigError("--truncation must be >= 2")
            self.modes = [replace(m, truncation=args.truncation) for m in self.modes]
        self.grid = FluxGrid.parse(args.flux) if args.flux else self.config.flux
        self.nonlinearity = (
            Nonlinearity.parse(args.nonlinearity) if args.nonlinearity else self.config.nonlinearity
        )

    def epr_model(self):
        return self.config.epr_model(self.modes)

    def epr_sweep(self):
        log.info("EPR sweep over %d flux points (%s)", self.grid.points, self.nonlinearity)
        return flux_sweep(
            self.epr_model(), self.grid.values(), self.nonlinearity, n_jobs=self.args.jobs
        )

    def lumped_sweep(self):
        params = self.config.lumped_parameters()
        nf, nr = self.config.lumped_levels()
        log.info("lumped sweep: E_C=%.6g E_L=%.6g g=%.6g GHz", params.E_C, params.E_L, params.g)
        return lumped_flux_sweep(params, self.grid.values(), nf, nr, n_jobs=self.args.jobs)


def _write(text, args, stdout):
    if args.out:
        try:
            with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
        except OSError as exc:
            raise ConfigError(f"cannot write {args.out}: {exc.strerror}") from exc
    else:
        stdout.write(text)


def _calibrate(run):
    config = run.config
    cal = config.calibration
    if cal is None:
        raise ConfigError("no 'calibration' block in the configuration", "/calibration")
    lumped = config.lumped_parameters() if config.lumped is not None else None
    if "E_C_ghz" in cal:
        E_C = cal["E_C_ghz"]
    elif lumped is not None:
        E_C = lumped.E_C
    else:
        raise ConfigError("calibration needs E_C_ghz or a lumped block", "/calibration")
    guess = (
        cal.get("initial_E_J_ghz", config.junctions[0].josephson_energy),
        cal.get("initial_E_L_ghz", lumped.E_L if lumped is not None else 1.0),
    )
    E_J, E_L = calibrate_EJ_EL(E_C, (cal["f01_zero_ghz"], cal["f01_half_ghz"]), guess)
    out = {"E_C_ghz": E_C, "E_J_ghz": E_J, "E_L_ghz": E_L}
    if "resonator_ghz" in cal and run.modes:
        out["resonator_offset_ghz"] = calibrate_resonator_offset(
            run.epr_model(), cal["resonator_ghz"], run.nonlinearity
        )
    return out


def run_command(argv=None, stdout=None, stderr=None):
    """Run one subcommand and return its exit status."""
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=stderr)
        return EXIT_INVALID
    handler = logging.StreamHandler(stderr)
    handler.setFormatter(logging.Formatter("%(name)s: %(message)s"))
    log.addHandler(handler)
    log.setLevel(logging.INFO if args.verbose else logging.WARNING)
    try:
        return _dispatch(args, stdout, stderr)
    finally:
        log.removeHandler(handler)


def _dispatch(args, stdout, stderr):
    try:
        run = _Run(args)
        if args.command == "epr-sweep":
            _write(format_sweep_csv(run.epr_sweep()), args, stdout)
        elif args.command == "lumped-sweep":
            _write(format_sweep_csv(run.lumped_sweep()), args, stdout)
        elif args.command == "chi":
            if run.grid.points != 1:
                raise ConfigError("chi evaluates a single flux point; pass --flux VALUE")
            result = run.epr_sweep()
            if result.warn[0]:
                print("warning: " + "; ".join(result.notes[0]), file=stderr)
            _write(f"{result.chi[0] * 1000.0:.12g}\n", args, stdout)
        elif args.command == "calibrate":
            _write(json.dumps(_calibrate(run), indent=2, sort_keys=True) + "\n", args, stdout)
        elif args.command == "compare":
            _write(format_compare_csv(run.epr_sweep(), run.lumped_sweep()), args, stdout)
    except ConvergenceError as exc:
        print(f"fluxepr: {exc}", file=stderr)
        return EXIT_NONCONVERGED
    except (ConfigError, ContractError, ValueError) as exc:
        print(f"fluxepr: {exc}", file=stderr)
        return EXIT_INVALID
    return EXIT_OK


def main():
    sys.exit(run_command())


if __name__ == "__main__":
    main()
