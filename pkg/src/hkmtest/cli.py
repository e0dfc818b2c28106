"""Command line front end.

Modes
-----
test      permutation test plus Delta estimate for every ``--a``
estimate  Delta estimate with confidence interval only
pairwise  permutation p-value for every pair of selected columns
simulate  estimation tables for the N1 / N2 / E alternatives

Preprocessing for the data modes always runs in the order
column selection -> log transform -> row exclusion -> standardization.
Row numbers are 1-based data rows (the header is not counted); columns are
given by header name or 1-based position.

Exit status: 0 success, 2 input error, 3 numerical failure.
"""

import argparse
import csv
import itertools
import json
import math
import sys
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from . import __version__, _backend
from .exceptions import InvalidDataError, NumericalError, SingularCovarianceError
from .permutation import DEFAULT_M, permutation_test
from .simulation import DEFAULT_REPS, SIZES, run_estimation_study
from .standardize import standardize
from .statistic import DEFAULT_A, SIMULATION_A, check_bandwidth
from .variance import estimate_delta

SCHEMA_VERSION = 1
MODES = ("test", "estimate", "simulate", "pairwise")
EXIT_OK, EXIT_INPUT, EXIT_NUMERIC = 0, 2, 3


@dataclass
class RunConfig:
    mode: str = "test"
    input: str | None = None
    delimiter: str = ","
    columns: list = field(default_factory=list)
    log_columns: list = field(default_factory=list)
    exclude_rows: list = field(default_factory=list)
    a: list | None = None
    m: int = DEFAULT_M
    alpha: float = 0.05
    level: float = 0.95
    seed: int | None = None
    reps: int = DEFAULT_REPS
    dists: list = field(default_factory=lambda: ["N1", "N2", "E"])
    sizes: list = field(default_factory=lambda: list(SIZES))
    workers: int = 1

    def validate(self):
        if self.mode not in MODES:
            raise InvalidDataError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.a is None:
            self.a = list(SIMULATION_A) if self.mode == "simulate" else [DEFAULT_A]
        if not self.a:
            raise InvalidDataError("at least one value of a is required")
        self.a = [check_bandwidth(v) for v in self.a]
        if not 0 < self.alpha < 1:
            raise InvalidDataError(f"alpha must lie in (0, 1), got {self.alpha}")
        if not 0 < self.level < 1:
            raise InvalidDataError(f"level must lie in (0, 1), got {self.level}")
        if self.m < 1 or self.reps < 1 or self.workers < 1:
            raise InvalidDataError("m, reps and workers must be positive")
        if self.mode != "simulate" and not self.input:
            raise InvalidDataError(f"mode {self.mode!r} needs --input")
        if self.seed is None:
            self.seed = int(np.random.SeedSequence().entropy)
        return self

    def as_dict(self):
        return asdict(self)


# ---------------------------------------------------------------- data input

def read_table(path, delimiter=","):
    """Read a CSV with a header row into (header, float array)."""
    try:
        with open(path, newline="") as fh:
            rows = [r for r in csv.reader(fh, delimiter=delimiter) if r and any(c.strip() for c in r)]
    except OSError as exc:
        raise InvalidDataError(f"cannot read {path}: {exc.strerror}") from None
    if len(rows) < 2:
        raise InvalidDataError(f"{path}: need a header row and at least one data row")
    header = [h.strip() for h in rows[0]]
    values = np.empty((len(rows) - 1, len(header)))
    for i, row in enumerate(rows[1:], start=1):
        if len(row) != len(header):
            raise InvalidDataError(f"{path}: data row {i} has {len(row)} fields, header has {len(header)}")
        for j, cell in enumerate(row):
            try:
                values[i - 1, j] = float(cell)
            except ValueError:
                raise InvalidDataError(f"{path}: data row {i}, column {header[j]!r}: not a number: {cell!r}") from None
    return header, values


def _column_index(header, spec):
    spec = str(spec).strip()
    if spec in header:
        return header.index(spec)
    try:
        pos = int(spec)
    except ValueError:
        raise InvalidDataError(f"unknown column {spec!r}") from None
    if not 1 <= pos <= len(header):
        raise InvalidDataError(f"column position {pos} out of range 1..{len(header)}")
    return pos - 1


def preprocess(header, values, columns=(), log_columns=(), exclude_rows=()):
    """Apply selection, log transform and row exclusion; returns (names, data)."""
    cols = [_column_index(header, c) for c in columns] if columns else list(range(len(header)))
    if len(set(cols)) != len(cols):
        raise InvalidDataError("a column is selected twice")
    data = values[:, cols].copy()
    names = [header[c] for c in cols]
    for spec in log_columns:
        orig = _column_index(header, spec)
        if orig not in cols:
            raise InvalidDataError(f"log column {header[orig]!r} is not among the selected columns")
        k = cols.index(orig)
        bad = np.flatnonzero(data[:, k] <= 0)
        if bad.size:
            raise InvalidDataError(
                f"column {header[orig]!r} has non-positive value {data[bad[0], k]!r} "
                f"at data row {bad[0] + 1}; cannot log-transform"
            )
        data[:, k] = np.log(data[:, k])
    if exclude_rows:
        drop = sorted({int(r) for r in exclude_rows})
        if drop[0] < 1 or drop[-1] > data.shape[0]:
            raise InvalidDataError(f"excluded rows must lie in 1..{data.shape[0]}")
        data = np.delete(data, [r - 1 for r in drop], axis=0)
    return names, data


def load_data(config):
    header, values = read_table(config.input, config.delimiter)
    return preprocess(header, values, config.columns, config.log_columns, config.exclude_rows)


# ------------------------------------------------------------------ runners

def _sub_seed(seed, *key):
    ss = np.random.SeedSequence(seed, spawn_key=tuple(key))
    return ss.generate_state(1, dtype=np.uint64)[0].item()


def _estimate_record(y, a, level):
    est = estimate_delta(y, a, level)
    return {
        "delta_hat": est.delta_hat,
        "sigma2_hat": est.sigma2_hat,
        "sigma2_negative": est.sigma2_negative,
        "ci": None if est.sigma2_negative else [est.ci_lo, est.ci_hi],
        "level": level,
    }


def _report(config, **body):
    return {
        "schema_version": SCHEMA_VERSION,
        "hkmtest_version": __version__,
        "backend": _backend.name,
        "config": config.as_dict(),
        **body,
    }


def run_test(config):
    """Permutation test and Delta estimate for each weight parameter."""
    names, data = load_data(config)
    y = standardize(data).residuals
    results = []
    for k, a in enumerate(config.a):
        res = permutation_test(y, a, m=config.m, alpha=config.alpha, seed=_sub_seed(config.seed, 1, k), workers=config.workers)
        results.append({
            "a": a,
            "statistic": res.observed.t_na,
            "p_value": res.p_value,
            "critical_value": res.critical_value,
            "reject": bool(res.reject),
            **_estimate_record(y, a, config.level),
        })
    return _report(config, columns=names, n=int(y.shape[0]), d=int(y.shape[1]), results=results)


def run_estimate(config):
    """Delta estimate with confidence interval, no permutation test."""
    names, data = load_data(config)
    y = standardize(data).residuals
    results = []
    for a in config.a:
        rec = _estimate_record(y, a, config.level)
        results.append({"a": a, "statistic": rec["delta_hat"] * y.shape[0], **rec})
    return _report(config, columns=names, n=int(y.shape[0]), d=int(y.shape[1]), results=results)


def run_pairwise(config):
    """Bivariate permutation test for every pair of selected columns.

    Each pair (i, j) uses its own sign stream derived from (seed, a, i, j).
    The p-value matrix is upper triangular; other entries are null.
    """
    names, data = load_data(config)
    d = data.shape[1]
    if d < 2:
        raise InvalidDataError("pairwise mode needs at least two columns")
    results = []
    for k, a in enumerate(config.a):
        pmat = [[None] * d for _ in range(d)]
        for i, j in itertools.combinations(range(d), 2):
            y = standardize(data[:, [i, j]]).residuals
            res = permutation_test(y, a, m=config.m, alpha=config.alpha, seed=_sub_seed(config.seed, 2, k, i, j),
                                   workers=config.workers)
            pmat[i][j] = res.p_value
        results.append({"a": a, "p_values": pmat})
    return _report(config, columns=names, n=int(data.shape[0]), results=results)


def run_simulation(config):
    """Estimation tables (mean T/n, mean sigma2_hat, negatives, coverage, relative MSE)."""
    rows = []
    for a in config.a:
        for dist in config.dists:
            rows.extend(
                r.as_dict()
                for r in run_estimation_study(dist, config.sizes, a, config.reps, config.seed, config.level, config.workers)
            )
    return _report(config, rows=rows)


RUNNERS = {"test": run_test, "estimate": run_estimate, "pairwise": run_pairwise, "simulate": run_simulation}


def run(config):
    """Validate ``config`` and dispatch on its mode."""
    config.validate()
    return RUNNERS[config.mode](config)


# ------------------------------------------------------------------ output

def _clean(obj):
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.generic):
        return _clean(obj.item())
    return obj


def dumps_report(report):
    """Serialize a report; identical reports give identical bytes."""
    return json.dumps(_clean(report), indent=2, sort_keys=True, allow_nan=False) + "\n"


TABLE_FIELDS = ("dist", "n", "a", "reps", "delta", "mean_delta_hat", "mean_sigma2_hat", "n_negative", "coverage", "relative_mse")


def write_table_csv(rows, path):
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=TABLE_FIELDS, lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: row[k] for k in TABLE_FIELDS})


# ------------------------------------------------------------------ parsing

def _csv_list(text):
    return [t.strip() for t in text.split(",") if t.strip()]


def _int_list(text):
    try:
        return [int(t) for t in _csv_list(text)]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma separated integers, got {text!r}") from None


def build_parser():
    p = argparse.ArgumentParser(prog="hkmtest", description="HKM test for multivariate reflected symmetry.")
    p.add_argument("--config", help="JSON file with RunConfig fields; command line flags override it")
    p.add_argument("--mode", choices=MODES)
    p.add_argument("--input", help="CSV file with a header row")
    p.add_argument("--delimiter")
    p.add_argument("--columns", type=_csv_list, help="columns to use (names or 1-based positions)")
    p.add_argument("--log-columns", type=_csv_list, help="columns to log-transform")
    p.add_argument("--exclude-rows", type=_int_list, help="1-based data rows to drop")
    p.add_argument("--a", type=float, action="append",
                   help="weight parameter; repeatable (default 1, or 0.01 and 0.1 in simulate mode)")
    p.add_argument("--m", type=int, help="number of permutation replicates")
    p.add_argument("--alpha", type=float)
    p.add_argument("--level", type=float, help="confidence level of the Delta interval")
    p.add_argument("--seed", type=int)
    p.add_argument("--reps", type=int, help="replications per simulation cell")
    p.add_argument("--dist", type=_csv_list, dest="dists", help="simulation distributions among N1,N2,E")
    p.add_argument("--sizes", type=_int_list, help="simulation sample sizes")
    p.add_argument("--workers", type=int)
    p.add_argument("--out", help="write the JSON report here instead of stdout")
    p.add_argument("--csv-out", help="simulate mode: also write the table as CSV")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__} ({_backend.name} kernels)")
    return p


def config_from_args(args):
    base = {}
    if args.config:
        try:
            with open(args.config) as fh:
                base = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise InvalidDataError(f"cannot read config {args.config}: {exc}") from None
        known = {f.name for f in fields(RunConfig)}
        unknown = set(base) - known
        if unknown:
            raise InvalidDataError(f"unknown config keys: {sorted(unknown)}")
    for f in fields(RunConfig):
        val = getattr(args, f.name, None)
        if val is not None:
            base[f.name] = val
    return RunConfig(**base)


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = config_from_args(args)
        report = run(config)
        text = dumps_report(report)
        if args.out:
            with open(args.out, "w") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
        if args.csv_out and config.mode == "simulate":
            write_table_csv(report["rows"], args.csv_out)
    except (SingularCovarianceError, NumericalError) as exc:
        print(f"hkmtest: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (InvalidDataError, OSError) as exc:
        print(f"hkmtest: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
