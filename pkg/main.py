#!/usr/bin/env python3
"""
Platesim - simulator uklještenog nosača sa frakcionim prigušenjem i kašnjenjem
Komande: run, table1, sweep
"""

import argparse
import logging
import os
import re
import sys
from typing import List, Optional, Sequence

# Dodavanje putanje za import modula
sys.path.append(os.path.dirname(os.path.abspath(__file__)))

from config.settings import settings
from models.simulation_config import SimulationConfig
from models.simulation_state import VerdictKind
from parsers.config_parser import ConfigError, ConfigParser, validate_config
from parsers.results_io import REGIME_FILE, SUMMARY_FILE, ResultsWriter
from analysis.observables import DecayFitError, detect_blowup, fit_decay_rate
from analysis.stability import build_regime_report, compare_table1, table1
from analysis.sweep import MAP_COLUMNS_TAIL, SweepSpecError, VarySpecParser, run_sweep
from solver.newmark import run

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_BLOWUP = 2
EXIT_USAGE = 64
EXIT_IO = 74

VERDICT_EXIT = {
    VerdictKind.COMPLETED: EXIT_OK,
    VerdictKind.BLEW_UP: EXIT_BLOWUP,
    VerdictKind.FAILED: EXIT_FAILED,
}


class UsageError(Exception):
    pass


class CliArgumentParser(argparse.ArgumentParser):
    """argparse bez sys.exit(2): kod 2 je rezervisan za blow-up"""

    def error(self, message):
        raise UsageError(message)


def _fmt(value: Optional[float]) -> str:
    return "none" if value is None else f"{value:.10g}"


class PlateSimulationApp:
    """Glavna klasa komandne linije"""

    def __init__(self):
        self.config_parser = ConfigParser()
        self.vary_parser = VarySpecParser()
        self.p_list_pattern = re.compile(r'^\s*(\d+(?:\.\d+)?)\s*\.\.\s*(\d+(?:\.\d+)?)\s*$')
        self.parser = self._setup_arguments()

    def _setup_arguments(self) -> argparse.ArgumentParser:
        parser = CliArgumentParser(prog="platesim", description=__doc__)
        parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
        sub = parser.add_subparsers(dest="command")

        run_cmd = sub.add_parser("run", help="single simulation run")
        run_cmd.add_argument("--config", required=True)
        run_cmd.add_argument("--out", required=True)
        run_cmd.add_argument("--dt", type=float, default=None)
        run_cmd.add_argument("--T", type=float, default=None)

        table_cmd = sub.add_parser("table1", help="critical amplitudes per source exponent")
        table_cmd.add_argument("--p", default=None, help="range 'a..b' or list '3,5,7' (default 3..9)")
        table_cmd.add_argument("--compare", action="store_true")
        table_cmd.add_argument("--out", required=True)

        sweep_cmd = sub.add_parser("sweep", help="parameter sweep (one or two parameters)")
        sweep_cmd.add_argument("--config", required=True)
        sweep_cmd.add_argument("--vary", action="append", required=True,
                               help="name=start:step:stop or name=v1,v2 (repeat for a 2-D grid)")
        sweep_cmd.add_argument("--workers", type=int, default=settings.DEFAULT_WORKERS)
        sweep_cmd.add_argument("--out", required=True)
        return parser

    def _setup_logging(self, verbose: bool):
        level = logging.DEBUG if verbose else getattr(logging, settings.LOG_LEVEL.upper(), logging.INFO)
        logging.basicConfig(level=level, format="%(asctime)s %(levelname)s %(name)s: %(message)s")

    def _load_config(self, config_path: str) -> SimulationConfig:
        return self.config_parser.parse_config_file(config_path)

    def parse_p_list(self, text: str) -> List[float]:
        """'3..9' (uključivo, celi brojevi) ili '3,5,7'"""
        match = self.p_list_pattern.match(text)
        try:
            if match:
                lo, hi = int(float(match.group(1))), int(float(match.group(2)))
                values = [float(p) for p in range(lo, hi + 1)]
            else:
                values = [float(v) for v in text.split(',') if v.strip()]
        except ValueError:
            raise UsageError(f"bad p list {text!r}")
        if any(p <= 2.0 for p in values):
            raise UsageError(f"every p must be > 2, got {text!r}")
        return values

    def cmd_run(self, config_path: str, out_dir: str,
                dt: Optional[float] = None, T: Optional[float] = None) -> int:
        cfg = self._load_config(config_path)
        overrides = {k: v for k, v in (("dt", dt), ("T", T)) if v is not None}
        if overrides:
            cfg = validate_config(cfg.replace(**overrides))

        print(f"🔧 N_nodes={cfg.N_nodes} dt={cfg.dt:g} T={cfg.T:g} m={cfg.m_delay} steps={cfg.n_steps}")
        report = build_regime_report(cfg)
        print(f"📊 Predicted regime: {report.predicted.value} (A1={report.a1_condition_holds}, "
              f"A2={report.a2_condition_holds}, E0={report.E0:.6g})")

        result = run(cfg)
        trace = result.trace

        if result.verdict.kind == VerdictKind.COMPLETED:
            try:
                trace.decay_rate = fit_decay_rate(trace, cfg.fit_start).w
            except DecayFitError as e:
                logger.info("Decay fit skipped: %s", e)
        t_star = detect_blowup(trace, cfg) if result.verdict.kind == VerdictKind.BLEW_UP else None
        summary = result.summary(t_star)

        writer = ResultsWriter(out_dir)
        writer.write_config(cfg)
        writer.write_report(report.to_dict(), REGIME_FILE)
        writer.write_energy(trace)
        writer.write_snapshots(result.snapshots)
        writer.write_report(summary, SUMMARY_FILE)
        print(f"✅ Results written to {os.path.abspath(out_dir)}")

        print(f"verdict={summary['verdict']} t_star={_fmt(summary['t_star'])} w={_fmt(summary['w'])} "
              f"E0={_fmt(summary['E0'])} wall={result.wall_time:.3f}")
        return VERDICT_EXIT[result.verdict.kind]

    def cmd_table1(self, out_path: str, p_list: Sequence[float], compare: bool = False) -> int:
        rows = table1(p_list)
        ResultsWriter().write_table1(rows, out_path)
        print(f"✅ Table with {len(rows)} row(s) written to {out_path}")

        if compare:
            deviations = compare_table1(rows)
            for entry in deviations:
                flag = " (printed value inconsistent with the d formula)" if entry["misprint"] else ""
                print(f"  p={entry['p']:g} {entry['quantity']:9s} computed={entry['computed']:.6g} "
                      f"printed={entry['printed']:.6g} rel_dev={entry['rel_dev']:.3%}{flag}")
            consistent = [e["rel_dev"] for e in deviations if not e["misprint"]]
            every = [e["rel_dev"] for e in deviations]
            if every:
                print(f"max_deviation={max(consistent, default=0.0):.6g} "
                      f"max_deviation_all={max(every):.6g}")
        return EXIT_OK

    def cmd_sweep(self, config_path: str, vary: Sequence[str], out_dir: str, workers: int) -> int:
        base = self._load_config(config_path)
        specs = [self.vary_parser.parse(v) for v in vary]
        rows = run_sweep(base, specs, max(1, workers))
        columns = [s.name for s in specs] + MAP_COLUMNS_TAIL
        path = ResultsWriter(out_dir).write_map(rows, columns)
        print(f"✅ Map with {len(rows)} point(s) written to {path}")
        return EXIT_OK

    def run(self, argv: Optional[Sequence[str]] = None) -> int:
        try:
            args = self.parser.parse_args(argv)
            if args.command is None:
                raise UsageError("missing command (run, table1, sweep)")
            self._setup_logging(args.verbose)

            if args.command == "run":
                return self.cmd_run(args.config, args.out, args.dt, args.T)
            if args.command == "table1":
                p_list = self.parse_p_list(args.p) if args.p else [float(p) for p in settings.TABLE1_P_VALUES]
                return self.cmd_table1(args.out, p_list, args.compare)
            return self.cmd_sweep(args.config, args.vary, args.out, args.workers)
        except (UsageError, SweepSpecError) as e:
            print(f"usage error: {e}", file=sys.stderr)
            return EXIT_USAGE
        except ConfigError as e:
            print(f"config error: {e}", file=sys.stderr)
            return EXIT_FAILED
        except OSError as e:
            print(f"I/O error: {e}", file=sys.stderr)
            return EXIT_IO


def main():
    """Glavna funkcija za pokretanje aplikacije"""
    app = PlateSimulationApp()
    sys.exit(app.run())


if __name__ == "__main__":
    main()
