"""Command-line harness: experiment configuration, sweeps, comparisons, dumps.

Subcommands: predict (quasiparticle curves), exact (lattice engine), compare
(method deviations against tolerances), oracle (pair-algebra and dense
suites), dump-matrix (textual matrix dumps). Exit codes: 0 pass, 1 usage,
2 numerical/resource, 3 tolerance violation.
"""

from __future__ import annotations

import argparse
import configparser
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, replace

import numpy as np

from . import __version__
from . import gaussian as ge
from . import oracles
from . import qp
from .core import NumericalError, TripartiteGeometry, dimer_state


class UsageError(ValueError):
    pass


class ToleranceViolation(RuntimeError):
    pass


DEFAULT_CEILING = 4000


@dataclass(frozen=True)
class ExperimentConfig:
    """One experiment: state, geometry, grids and numerical knobs."""

    state: str = "dimer"
    l1: int = 200
    l2: int = 200
    d: int = 200
    tmin: float = 0.0
    tmax: float = 600.0
    steps: int = 31
    alphas: tuple[int, ...] = (1, 2, 3)
    lambdas: tuple[float, ...] = ()
    kgrid: int = qp.DEFAULT_KGRID
    cutoff: float = ge.DEFAULT_CUTOFF
    ceiling: int = DEFAULT_CEILING
    workers: int = 0  # 0 = NEGHAM_THREADS if set, else available parallelism
    fmt: str = "csv"

    def validate(self) -> None:
        errs = []
        if self.state != "dimer":
            errs.append(f"state.kind = {self.state!r}: only the 'dimer' preset is available")
        for name in ("l1", "l2", "d"):
            if getattr(self, name) < 1:
                errs.append(f"geometry.{name} = {getattr(self, name)}: must be >= 1")
        if self.tmin < 0 or self.tmax < self.tmin:
            errs.append(f"time grid [{self.tmin}, {self.tmax}] must be nonnegative and increasing")
        if self.steps < 1:
            errs.append(f"time.steps = {self.steps}: must be >= 1")
        if any((not isinstance(a, (int, np.integer))) or a < 1 for a in self.alphas):
            errs.append(f"observables.alphas = {self.alphas}: integers >= 1 required")
        if self.kgrid < 16:
            errs.append(f"numerics.kgrid = {self.kgrid}: too small")
        if not (0.0 < self.cutoff <= 0.01):
            errs.append(
                f"numerics.cutoff = {self.cutoff}: outside the sane range (0, 0.01]"
            )
        if self.ceiling < 4:
            errs.append(f"numerics.ceiling = {self.ceiling}: too small")
        if self.workers < 0:
            errs.append(f"run.workers = {self.workers}: must be >= 0 (0 = auto)")
        if self.fmt not in ("csv", "json"):
            errs.append(f"run.format = {self.fmt!r}: choose csv or json")
        if errs:
            raise UsageError("invalid configuration:\n  " + "\n  ".join(errs))

    def geometry(self) -> TripartiteGeometry:
        return TripartiteGeometry(self.l1, self.l2, self.d)

    def occupation(self):
        return dimer_state()

    def times(self) -> np.ndarray:
        return np.linspace(self.tmin, self.tmax, self.steps)

    def resolved_workers(self) -> int:
        if self.workers:
            return self.workers
        env = os.environ.get("NEGHAM_THREADS")
        if env:
            return max(1, int(env))
        return os.cpu_count() or 1

    # ---- config-file round trip -------------------------------------------

    _SECTIONS = {
        "state": ("kind",),
        "geometry": ("l1", "l2", "d"),
        "time": ("tmin", "tmax", "steps"),
        "observables": ("alphas", "lambdas"),
        "numerics": ("kgrid", "cutoff", "ceiling"),
        "run": ("workers", "format"),
    }

    def to_file(self, path) -> None:
        cp = configparser.ConfigParser()
        cp["state"] = {"kind": self.state}
        cp["geometry"] = {k: str(getattr(self, k)) for k in ("l1", "l2", "d")}
        cp["time"] = {"tmin": repr(self.tmin), "tmax": repr(self.tmax), "steps": str(self.steps)}
        cp["observables"] = {
            "alphas": ",".join(str(a) for a in self.alphas),
            "lambdas": ",".join(repr(x) for x in self.lambdas),
        }
        cp["numerics"] = {
            "kgrid": str(self.kgrid),
            "cutoff": repr(self.cutoff),
            "ceiling": str(self.ceiling),
        }
        cp["run"] = {"workers": str(self.workers), "format": self.fmt}
        with open(path, "w") as fh:
            cp.write(fh)

    @classmethod
    def from_file(cls, path) -> "ExperimentConfig":
        cp = configparser.ConfigParser()
        read = cp.read(path)
        if not read:
            raise UsageError(f"config file {path!r} not found or unreadable")
        try:
            kw = {}
            if cp.has_option("state", "kind"):
                kw["state"] = cp.get("state", "kind")
            for name in ("l1", "l2", "d"):
                if cp.has_option("geometry", name):
                    kw[name] = cp.getint("geometry", name)
            for name, conv in (("tmin", cp.getfloat), ("tmax", cp.getfloat)):
                if cp.has_option("time", name):
                    kw[name] = conv("time", name)
            if cp.has_option("time", "steps"):
                kw["steps"] = cp.getint("time", "steps")
            if cp.has_option("observables", "alphas"):
                raw = cp.get("observables", "alphas").strip()
                kw["alphas"] = tuple(int(x) for x in raw.split(",") if x.strip()) if raw else ()
            if cp.has_option("observables", "lambdas"):
                raw = cp.get("observables", "lambdas").strip()
                kw["lambdas"] = tuple(float(x) for x in raw.split(",") if x.strip()) if raw else ()
            if cp.has_option("numerics", "kgrid"):
                kw["kgrid"] = cp.getint("numerics", "kgrid")
            if cp.has_option("numerics", "cutoff"):
                kw["cutoff"] = cp.getfloat("numerics", "cutoff")
            if cp.has_option("numerics", "ceiling"):
                kw["ceiling"] = cp.getint("numerics", "ceiling")
            if cp.has_option("run", "workers"):
                kw["workers"] = cp.getint("run", "workers")
            if cp.has_option("run", "format"):
                kw["fmt"] = cp.get("run", "format")
        except ValueError as err:
            raise UsageError(f"config file {path!r}: {err}") from None
        return cls(**kw)


@dataclass(frozen=True)
class ResultRow:
    """One scalar result with full provenance."""

    method: str
    quantity: str
    t: float
    alpha: int
    lam: float | None
    value_re: float
    value_im: float
    cutoff: float
    kgrid: int
    version: str = __version__

    def sort_key(self):
        return (self.quantity, self.alpha, self.lam if self.lam is not None else -1.0, self.t, self.method)


CSV_HEADER = "method,quantity,t,alpha,lambda,value_re,value_im,cutoff,kgrid,version"


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def row_to_csv(r: ResultRow) -> str:
    lam = _fmt(r.lam) if r.lam is not None else ""
    return ",".join(
        [r.method, r.quantity, _fmt(r.t), str(r.alpha), lam, _fmt(r.value_re), _fmt(r.value_im),
         _fmt(r.cutoff), str(r.kgrid), r.version]
    )


def emit(rows: list[ResultRow], cfg: ExperimentConfig, stream) -> None:
    rows = sorted(rows, key=ResultRow.sort_key)
    if cfg.fmt == "json":
        json.dump([asdict(r) for r in rows], stream, indent=1)
        stream.write("\n")
        return
    stream.write(CSV_HEADER + "\n")
    for r in rows:
        stream.write(row_to_csv(r) + "\n")


# ---------------------------------------------------------------------------
# work-item evaluation (module level, picklable for the process pool)
# ---------------------------------------------------------------------------

def _predict_point(cfg: ExperimentConfig, t: float) -> list[ResultRow]:
    geom, occ = cfg.geometry(), cfg.occupation()
    rows = []

    def add(quantity, alpha, lam, value):
        v = complex(value)
        rows.append(ResultRow("qp", quantity, t, alpha, lam, v.real, v.imag, cfg.cutoff, cfg.kgrid))

    alphas = sorted(set(cfg.alphas) | {1})
    for a in alphas:
        add("entropy", a, None, qp.renyi_entropy(a, t, occ, geom, nk=cfg.kgrid))
        add("negativity", a, None, qp.renyi_negativity(a, t, occ, geom, nk=cfg.kgrid))
        add("log_ratio", a, None, qp.log_ratio(a, t, occ, geom, nk=cfg.kgrid))
        for lam in cfg.lambdas:
            add("charged_moment", a, lam, qp.charged_moment_log(a, lam, t, occ, geom, nk=cfg.kgrid))
    return rows


def _exact_point(cfg: ExperimentConfig, t: float) -> list[ResultRow]:
    geom = cfg.geometry()
    C = ge.restrict(ge.correlation_dimer(t, np.arange(geom.span)), geom)
    rows = []

    def add(quantity, alpha, value):
        v = complex(value)
        rows.append(ResultRow("exact", quantity, t, alpha, None, v.real, v.imag, cfg.cutoff, cfg.kgrid))

    alphas = sorted(set(cfg.alphas) | {1})
    for a in alphas:
        s = ge.renyi_entropy_exact(C, a)
        e = ge.renyi_negativity_determinant(C, geom, a)
        add("entropy", a, s)
        add("negativity", a, e)
        add("log_ratio", a, e if a == 1 else e + (a - 1) * s)
    return rows


def _run_points(fn, cfg: ExperimentConfig) -> list[ResultRow]:
    ts = cfg.times()
    workers = cfg.resolved_workers()
    rows: list[ResultRow] = []
    if workers <= 1:
        for t in ts:
            rows.extend(fn(cfg, float(t)))
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for chunk in pool.map(fn, [cfg] * len(ts), [float(t) for t in ts]):
                rows.extend(chunk)
    return rows


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_predict(cfg: ExperimentConfig, out) -> int:
    emit(_run_points(_predict_point, cfg), cfg, out)
    return 0


def cmd_exact(cfg: ExperimentConfig, out, profiles_prefix: str | None = None) -> int:
    geom = cfg.geometry()
    if 2 * geom.total_sites > cfg.ceiling:
        raise NumericalError(
            f"matrix dimension 2(l1+l2) = {2 * geom.total_sites} exceeds the ceiling {cfg.ceiling}"
        )
    rows = _run_points(_exact_point, cfg)
    emit(rows, cfg, out)
    if profiles_prefix is not None:
        _write_profiles(cfg, profiles_prefix)
    return 0


def _write_profiles(cfg: ExperimentConfig, prefix: str) -> None:
    """Dump K and N_diag nearest-site profiles plus the N_imag spectrum at tmax."""
    geom, occ, t = cfg.geometry(), cfg.occupation(), cfg.tmax
    C = ge.restrict(ge.correlation_dimer(t, np.arange(geom.span)), geom)
    K = ge.entanglement_hamiltonian(C, cutoff=cfg.cutoff, pure="drop")
    N = ge.negativity_hamiltonian(ge.fermionic_partial_transpose(C, geom), cutoff=cfg.cutoff, pure="drop")
    Kref = ge.mixed_reference_bdg(K, geom)
    _, NI, ND, NO = ge.decompose(N, Kref)
    sites = geom.lattice_sites()
    pos = {s: i for i, s in enumerate(sites)}
    AK, AD = ge.hopping_coefficients(K), ge.hopping_coefficients(ND)
    with open(prefix + "_profiles.csv", "w") as fh:
        fh.write("site,x,K_re,K_im,Ndiag_re,Ndiag_im,Kplus_re,Kminus_re\n")
        for x in sites[:-1]:
            if x + 1 not in pos:
                continue
            kv, dv = AK[pos[x], pos[x + 1]], AD[pos[x], pos[x + 1]]
            xc = float(geom.to_continuum(x))
            kp, km = qp.kernel_plus_minus(xc, 1, t, occ, geom)
            fh.write(
                f"{x},{_fmt(xc)},{_fmt(kv.real)},{_fmt(kv.imag)},{_fmt(dv.real)},{_fmt(dv.imag)},"
                f"{_fmt(kp.real)},{_fmt((-km).real)}\n"
            )
    ev = np.linalg.eigvalsh(NI.entries)
    with open(prefix + "_nimag_eigenvalues.csv", "w") as fh:
        fh.write("eigenvalue\n")
        for v in np.sort(ev):
            fh.write(_fmt(float(v)) + "\n")


def cmd_compare(cfg: ExperimentConfig, out, tol_abs: float, tol_rel_peak: float) -> int:
    geom = cfg.geometry()
    if 2 * geom.total_sites > cfg.ceiling:
        raise NumericalError(
            f"matrix dimension 2(l1+l2) = {2 * geom.total_sites} exceeds the ceiling {cfg.ceiling}"
        )
    qp_rows = {(_r.quantity, _r.alpha, _r.t): _r for _r in _run_points(_predict_point, cfg)}
    ex_rows = {(_r.quantity, _r.alpha, _r.t): _r for _r in _run_points(_exact_point, cfg)}
    keys = sorted(set(qp_rows) & set(ex_rows))
    peaks: dict[tuple[str, int], float] = {}
    for q, a, t in keys:
        peaks[(q, a)] = max(peaks.get((q, a), 0.0), abs(ex_rows[(q, a, t)].value_re))
    report = []
    worst = None
    for key in keys:
        q, a, t = key
        dev = abs(qp_rows[key].value_re - ex_rows[key].value_re)
        allowed = max(tol_abs, tol_rel_peak * peaks[(q, a)])
        ok = dev <= allowed
        report.append(
            {"quantity": q, "alpha": a, "t": t, "qp": qp_rows[key].value_re,
             "exact": ex_rows[key].value_re, "deviation": dev, "allowed": allowed, "pass": ok}
        )
        if not ok and (worst is None or dev - allowed > worst[0]):
            worst = (dev - allowed, key, dev, allowed)
    payload = {
        "config": asdict(cfg),
        "tolerances": {"abs": tol_abs, "rel_peak": tol_rel_peak},
        "rows": report,
        "pass": worst is None,
    }
    json.dump(payload, out, indent=1)
    out.write("\n")
    nfail = sum(1 for r in report if not r["pass"])
    print(f"compare: {len(report) - nfail}/{len(report)} within tolerance", file=sys.stderr)
    if worst is not None:
        _, key, dev, allowed = worst
        raise ToleranceViolation(
            f"{key[0]} alpha={key[1]} t={key[2]}: |qp - exact| = {dev:.3e} > allowed {allowed:.3e}"
        )
    return 0


def cmd_oracle(out) -> int:
    checks = oracles.run_pair_suite() + oracles.run_dense_suite()
    failed = 0
    for c in checks:
        status = "PASS" if c.passed else "FAIL"
        out.write(f"{status} {c.name}: deviation {c.deviation:.3e} (tol {c.tol:.1e})\n")
        failed += 0 if c.passed else 1
    if failed:
        raise ToleranceViolation(f"{failed} oracle identities violated")
    return 0


def cmd_dump_matrix(cfg: ExperimentConfig, what: str, t: float, out_path: str) -> int:
    geom = cfg.geometry()
    if 2 * geom.total_sites > cfg.ceiling:
        raise NumericalError(
            f"matrix dimension exceeds the ceiling {cfg.ceiling}"
        )
    C = ge.restrict(ge.correlation_dimer(t, np.arange(geom.span)), geom)
    if what == "C":
        M = C.entries
    elif what == "C_tilde":
        M = ge.imbalance_frame(C, geom)
    elif what == "Gamma":
        M = ge.fermionic_partial_transpose(C, geom).entries
    elif what == "K":
        M = ge.entanglement_hamiltonian(C, cutoff=cfg.cutoff).entries
    else:
        N = ge.negativity_hamiltonian(ge.fermionic_partial_transpose(C, geom), cutoff=cfg.cutoff)
        if what == "N":
            M = N.entries
        else:
            K = ge.mixed_reference_bdg(ge.entanglement_hamiltonian(C, cutoff=cfg.cutoff), geom)
            NR, NI, ND, NO = ge.decompose(N, K)
            M = {"N_real": NR, "N_imag": NI, "N_diag": ND, "N_offdiag": NO}[what].entries
    ge.write_matrix(M, out_path)
    return 0


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _add_config_args(p):
    p.add_argument("--config", help="config file (flat key = value with section headers)")
    p.add_argument("--state", choices=["dimer"], help="initial state preset")
    p.add_argument("--l", type=int, help="both interval lengths")
    p.add_argument("--l1", type=int)
    p.add_argument("--l2", type=int)
    p.add_argument("--d", type=int, help="gap between the intervals (sites)")
    p.add_argument("--tmin", type=float)
    p.add_argument("--tmax", type=float)
    p.add_argument("--steps", type=int)
    p.add_argument("--alpha", type=int, action="append", help="moment order (repeatable)")
    p.add_argument("--lambdas", help="comma list of counting angles")
    p.add_argument("--kgrid", type=int)
    p.add_argument("--cutoff", type=float)
    p.add_argument("--ceiling", type=int)
    p.add_argument("--workers", type=int, help="0 = auto (NEGHAM_THREADS or cpu count)")
    p.add_argument("--format", dest="fmt", choices=["csv", "json"])
    p.add_argument("--out", help="output path (default stdout)")


def _build_config(args) -> ExperimentConfig:
    cfg = ExperimentConfig.from_file(args.config) if args.config else ExperimentConfig()
    updates = {}
    if args.l is not None:
        updates["l1"] = updates["l2"] = args.l
    for name in ("l1", "l2", "d", "tmin", "tmax", "steps", "kgrid", "cutoff", "ceiling", "workers", "fmt"):
        v = getattr(args, name, None)
        if v is not None:
            updates[name] = v
    if args.state is not None:
        updates["state"] = args.state
    if args.alpha:
        updates["alphas"] = tuple(args.alpha)
    if args.lambdas is not None:
        updates["lambdas"] = tuple(float(x) for x in args.lambdas.split(",") if x.strip())
    cfg = replace(cfg, **updates)
    cfg.validate()
    return cfg


def main(argv=None) -> int:
    parser = _Parser(prog="negham", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("predict", help="quasiparticle predictions")
    _add_config_args(p)

    p = sub.add_parser("exact", help="exact lattice engine sweep")
    _add_config_args(p)
    p.add_argument("--profiles", help="prefix for kernel-profile and spectrum dumps at tmax")

    p = sub.add_parser("compare", help="quasiparticle vs exact with tolerances")
    _add_config_args(p)
    p.add_argument("--tol-abs", type=float, default=0.5)
    p.add_argument("--tol-rel-peak", type=float, default=0.05)

    p = sub.add_parser("oracle", help="run the pair-algebra and dense oracle suites")
    p.add_argument("--out", help="output path (default stdout)")

    p = sub.add_parser("dump-matrix", help="textual dump of an engine matrix")
    _add_config_args(p)
    p.add_argument("--what", required=True,
                   choices=["C", "C_tilde", "Gamma", "K", "N", "N_real", "N_imag", "N_diag", "N_offdiag"])
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--dump-out", required=True, help="path of the matrix dump")

    try:
        args = parser.parse_args(argv)
        out = open(args.out, "w") if getattr(args, "out", None) else sys.stdout
        try:
            if args.command == "oracle":
                return cmd_oracle(out)
            cfg = _build_config(args)
            if args.command == "predict":
                return cmd_predict(cfg, out)
            if args.command == "exact":
                return cmd_exact(cfg, out, args.profiles)
            if args.command == "compare":
                return cmd_compare(cfg, out, args.tol_abs, args.tol_rel_peak)
            if args.command == "dump-matrix":
                return cmd_dump_matrix(cfg, args.what, args.t, args.dump_out)
            raise UsageError(f"unknown command {args.command!r}")
        finally:
            if out is not sys.stdout:
                out.close()
    except UsageError as err:
        print(f"usage error: {err}", file=sys.stderr)
        return 1
    except (NumericalError, ValueError) as err:
        print(f"numerical error: {err}", file=sys.stderr)
        return 2
    except ToleranceViolation as err:
        print(f"tolerance violation: {err}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
