"""Verification orchestration and reports.

Every check produces one :class:`CheckRecord`.  Randomness comes from one
seed, split per check by a stable label, so adding a check never changes the
samples of another.  Reports are sorted by check id and, unless timings are
requested, contain nothing that varies between runs with the same
configuration.
"""

import json
import os
import time
import zlib
from dataclasses import dataclass, field
from fractions import Fraction

import jsonschema
import numpy as np

from . import __version__
from . import ks_hodge as ks
from . import local_lemmas as local
from . import siegel as sg
from . import twisted as tw
from .exactnum import DEFAULT_DIGITS
from .fixtures import BUILTIN, load_fixture
from .quatalg import scaled_unimodular_lattice
from .zlattice import dual

SUITES = ("siegel", "twisted", "local", "lemma-app", "ks-pairing", "cech")
DIGITS_ENV = "KS_VERIFY_DIGITS"


class ConfigError(ValueError):
    """Invalid run configuration (treated like an invalid fixture)."""


def default_digits():
    raw = os.environ.get(DIGITS_ENV)
    if raw is None:
        return DEFAULT_DIGITS
    try:
        d = int(raw)
    except ValueError:
        raise ConfigError(f"{DIGITS_ENV} must be an integer, got {raw!r}") from None
    if d < 16:
        raise ConfigError(f"{DIGITS_ENV} must be at least 16")
    return d


def check_rng(seed, label):
    return np.random.default_rng([seed, zlib.crc32(label.encode())])


# ---------------------------------------------------------------------------
# records and reports


@dataclass
class CheckRecord:
    id: str
    passed: bool
    params: dict = field(default_factory=dict)
    residual: float = None
    exact: bool = False
    tolerance: float = None
    samples: int = 1
    witness: object = None
    info: dict = field(default_factory=dict)
    runtime: float = None

    @property
    def status(self):
        return "PASS" if self.passed else "FAIL"

    def to_dict(self, timing=False):
        out = {
            "id": self.id,
            "status": self.status,
            "params": self.params,
            "residual": None if self.residual is None else f"{self.residual:.2e}",
            "exact": self.exact,
            "tolerance": None if self.tolerance is None else f"{self.tolerance:.2e}",
            "samples": self.samples,
            "witness": None if self.passed else self.witness,
            "info": self.info,
        }
        if timing:
            out["runtime"] = None if self.runtime is None else round(self.runtime, 6)
        return out


@dataclass
class VerificationReport:
    seed: int
    digits: int
    checks: list = field(default_factory=list)
    version: str = __version__
    timing: bool = False

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def add(self, record):
        if any(c.id == record.id for c in self.checks):
            raise ValueError(f"duplicate check id {record.id}")
        self.checks.append(record)

    def to_dict(self):
        return {
            "toolkit": "ksverify",
            "version": self.version,
            "seed": self.seed,
            "digits": self.digits,
            "passed": self.passed,
            "checks": [c.to_dict(self.timing) for c in sorted(self.checks, key=lambda c: c.id)],
        }


_NUM = {"type": ["string", "null"], "pattern": r"^-?\d\.\d{2}e[+-]\d{2,3}$"}

REPORT_SCHEMA = {
    "type": "object",
    "required": ["toolkit", "version", "seed", "digits", "passed", "checks"],
    "additionalProperties": False,
    "properties": {
        "toolkit": {"const": "ksverify"},
        "version": {"type": "string"},
        "seed": {"type": "integer"},
        "digits": {"type": "integer"},
        "passed": {"type": "boolean"},
        "checks": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["id", "status", "params", "residual", "exact", "tolerance", "samples", "witness", "info"],
                "additionalProperties": False,
                "properties": {
                    "id": {"type": "string"},
                    "status": {"enum": ["PASS", "FAIL"]},
                    "params": {"type": "object"},
                    "residual": _NUM,
                    "exact": {"type": "boolean"},
                    "tolerance": _NUM,
                    "samples": {"type": "integer", "minimum": 0},
                    "witness": {},
                    "info": {"type": "object"},
                    "runtime": {"type": ["number", "null"]},
                },
            },
        },
    },
}


def report_json(report):
    data = report.to_dict() if isinstance(report, VerificationReport) else report
    jsonschema.validate(data, REPORT_SCHEMA)
    return json.dumps(data, indent=2, sort_keys=True) + "\n"


def report_text(report):
    data = report.to_dict() if isinstance(report, VerificationReport) else report
    rows = [(c["id"], c["status"], c["residual"] or ("exact" if c["exact"] else "-")) for c in data["checks"]]
    w = max([len("check")] + [len(r[0]) for r in rows])
    lines = [f"{'check':<{w}}  status  max residual", f"{'-' * w}  ------  ------------"]
    lines += [f"{i:<{w}}  {s:<6}  {r}" for i, s, r in rows]
    total = len(rows)
    failed = sum(1 for r in rows if r[1] == "FAIL")
    lines.append(f"{total} checks, {failed} failed (seed {data['seed']}, {data['digits']} digits)")
    return "\n".join(lines) + "\n"


def emit_report(report, fmt="json", path=None):
    """Serialise a report; write it to ``path`` if given and return the text."""
    if fmt == "json":
        text = report_json(report)
    elif fmt == "text":
        text = report_text(report)
    else:
        raise ConfigError(f"unknown report format {fmt!r}")
    if path is not None:
        try:
            with open(path, "w") as fh:
                fh.write(text)
        except OSError as exc:
            raise OSError(f"cannot write report to {path}: {exc.strerror}") from None
    return text


def load_report(path):
    with open(path) as fh:
        data = json.load(fh)
    jsonschema.validate(data, REPORT_SCHEMA)
    return data


# ---------------------------------------------------------------------------
# configuration


@dataclass
class SuiteConfig:
    suites: tuple = ()
    seed: int = 0
    digits: int = None
    samples: int = None
    siegel_shapes: tuple = ((1, 1), (2, 1), (3, 1), (1, 2))
    fixtures: tuple = BUILTIN
    primes: tuple = (5, 13)
    levels: tuple = (2, 3)
    local_cases: tuple = ("bad", "good")
    lemma_r: tuple = (2,)
    ks_r: tuple = (1, 2, 3)
    ks_points: int = 10
    grid: int = 3
    timing: bool = False

    def __post_init__(self):
        if self.digits is None:
            self.digits = default_digits()
        for s in self.suites:
            if s not in SUITES:
                raise ConfigError(f"unknown suite {s!r}; choose from {', '.join(SUITES)}")


def _n(config, default):
    return default if config.samples is None else config.samples


def _timed(fn):
    def wrapper(*args, **kwargs):
        t0 = time.perf_counter()
        records = fn(*args, **kwargs)
        dt = time.perf_counter() - t0
        for r in records:
            r.runtime = dt / len(records)
        return records

    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


# ---------------------------------------------------------------------------
# suites


def _shape_id(r, g):
    return f"r={r},g={g}"


@_timed
def siegel_checks(r, g, samples, seed):
    """Metric identity, covolume cross-check and Riemann axioms on random points of ``H_r^g``."""
    tag = _shape_id(r, g)
    params = {"r": r, "g": g}
    rng = check_rng(seed, f"siegel[{tag}]")
    main_max = cov_max = compat_max = 0.0
    margin_min = np.inf
    orientations = set()
    worst_main = worst_cov = worst_ax = None
    for k in range(samples):
        z = sg.random_siegel_point(rng, r, g)
        res = sg.verify_siegel_main(z)
        cov = sg.covolume_crosscheck(z)
        if res >= main_max:
            main_max, worst_main = res, k
        if cov >= cov_max:
            cov_max, worst_cov = cov, k
        for ax in sg.riemann_axioms(z, rng, samples=20):
            orientations.add(ax["orientation"])
            compat_max = max(compat_max, ax["compat_defect"])
            if min(ax["min_margin"], ax["min_eigen_margin"]) < margin_min:
                margin_min = min(ax["min_margin"], ax["min_eigen_margin"])
                worst_ax = {"sample": k, "place": ax["place"], "vector": ax["witness"]}
    std = sg.verify_siegel_main(sg.standard_point(r, g))
    exact = sg.riemann_form_exact_checks(r)
    oriented = len(orientations) == 1 and 0 not in orientations
    return [
        CheckRecord(f"siegel.main[{tag}]", main_max < 1e-10, params, main_max, False, 1e-10, samples,
                    {"sample": worst_main}),
        CheckRecord(f"siegel.covolume[{tag}]", cov_max < 1e-10, params, cov_max, False, 1e-10, samples,
                    {"sample": worst_cov}),
        CheckRecord(f"siegel.standard_point[{tag}]", std < 1e-12, params, std, False, 1e-12, 1,
                    {"Z": "i I_r at every place"}),
        CheckRecord(
            f"siegel.riemann_axioms[{tag}]",
            oriented and compat_max < 1e-10 and margin_min > 0,
            params, compat_max, False, 1e-10, samples, worst_ax,
            {"orientation": sorted(orientations), "min_margin": f"{margin_min:.2e}"},
        ),
        CheckRecord(
            f"siegel.riemann_form[r={r}]" if g == 1 else f"siegel.riemann_form[{tag}]",
            exact["alternating"] and exact["integral"] and exact["det"] == 1,
            {"r": r}, None, True, None, 1, {k: str(v) for k, v in exact.items()},
        ),
    ]


@_timed
def twisted_checks(fx, samples, seed, digits):
    """Volume, metric identity, Riemann axioms and exact lattice facts for one fixture."""
    name = fx.name
    base = f"twisted.{name}"
    params = {"fixture": name, "g": fx.g, "d_B_power": "Nm_F/Q(d_B)"}
    rng = check_rng(seed, base)
    vol_max = main_max = compat_max = 0.0
    margin_min = np.inf
    orientations = set()
    worst = {}
    elements = None
    gram = None
    for k in range(samples):
        pt = tw.random_twisted_point(rng, fx.g)
        lat = tw.build_twisted_lattice(fx.order, fx.mu, pt, digits, fx.lattice_multiplier)
        if gram is None:
            elements = lat.elements
            gram = [[float(x) for x in row] for row in tw.twisted_gram(elements, fx.mu)]
        v = tw.verify_twisted_volume(lat, fx.d_B)
        m = tw.verify_twisted_main(lat, fx.d_B)
        if v >= vol_max:
            vol_max, worst["volume"] = v, {"tau": [str(t) for t in pt.tau]}
        if m >= main_max:
            main_max, worst["main"] = m, {"tau": [str(t) for t in pt.tau]}
        ax = sg.form_axioms(sg.real_form(lat.basis, gram), rng, samples=20)
        orientations.add(ax["orientation"])
        compat_max = max(compat_max, ax["compat_defect"])
        mm = min(ax["min_margin"], ax["min_eigen_margin"])
        if mm < margin_min:
            margin_min, worst["axioms"] = mm, {"tau": [str(t) for t in pt.tau], "vector": ax["witness"]}
    flipped = orientations == {-1}
    oriented = len(orientations) == 1 and 0 not in orientations
    exact = tw.riemann_form_exact_checks(list(elements), fx.mu)
    lam, psi, ell = scaled_unimodular_lattice(fx.order, fx.a_pure)
    unimodular = dual(lam, psi) == lam
    one = tw.TwistedPoint((1j,) * fx.g)
    bare_vol, bare_res = tw.verify_bare_order_volume(fx.order, fx.mu, one, fx.d_B, digits)
    d_f = fx.field.discriminant
    records = [
        CheckRecord(f"{base}.volume", vol_max < 1e-10, params, vol_max, False, 1e-10, samples, worst.get("volume"),
                    {"Nm_d_B": str(abs(fx.d_B.norm()))}),
        CheckRecord(f"{base}.main", main_max < 1e-10, params, main_max, False, 1e-10, samples, worst.get("main")),
        CheckRecord(
            f"{base}.riemann_axioms", oriented and compat_max < 1e-10 and margin_min > 0,
            params, compat_max, False, 1e-10, samples, worst.get("axioms"),
            {"orientation": sorted(orientations), "sign_flipped": flipped, "min_margin": f"{margin_min:.2e}"},
        ),
        CheckRecord(
            f"{base}.riemann_form", exact["alternating"] and exact["integral"] and abs(exact["det"]) == 1,
            params, None, True, None, 1, {k: str(v) for k, v in exact.items()}, {"gram_det": str(exact["det"])},
        ),
        CheckRecord(
            f"{base}.unimodular", unimodular, params, None, True, None, 1,
            {"ell": [[str(c) for c in r] for r in ell.zbasis]},
            {"ell": [[str(c) for c in r] for r in ell.zbasis]},
        ),
        CheckRecord(
            f"{base}.bare_order_volume", bare_res < 1e-10, params, bare_res, False, 1e-10, 1, {"covolume": bare_vol},
            {"d_F": str(d_f), "covolume_at_i": f"{bare_vol:.6e}", "normalization": "d_F^2 Nm(d_B) prod Im(tau)^2"},
        ),
    ]
    if fx.g == 1:
        idx = tw.dual_index(fx.order)
        want = int(abs(fx.d_B.norm())) ** 2
        records.append(
            CheckRecord(f"{base}.dual_index", idx == want, params, None, True, None, 1,
                        {"index": idx, "d_B_squared": want}, {"index": idx})
        )
    return records


@_timed
def local_checks(p, k, case):
    tag = f"p={p},k={k}"
    params = {"p": p, "k": k, "depth": k}
    try:
        local.TruncatedUnramified(p, k)
        if case == "bad" and k < 2:
            raise local.LocalError("the bad-prime check needs k >= 2")
    except local.LocalError as exc:
        raise ConfigError(str(exc)) from None
    if case == "bad":
        res = local.verify_bad_prime(p, k)
        summary = {kk: v for kk, v in res.items() if isinstance(v, bool)}
        return [CheckRecord(f"local.bad[{tag}]", res["ok"], params, None, True, None, 1,
                            {"checks": summary, "det_image_hnf": res["det_image_hnf"]},
                            {"c": res["c"], "hom_basis": "(1, varpi)"})]
    res = local.verify_good_prime(p, k)
    return [CheckRecord(f"local.good[{tag}]", res["ok"], params, None, True, None, 1, res, {"index": res["index"]})]


@_timed
def lemma_app_checks(seed, samples, r_values, fixtures, digits):
    records = []
    rng = check_rng(seed, "lemma_app.standard")
    res = ks.verify_lemma_app(ks.standard_lemma_form(), rng, samples)
    records.append(CheckRecord("lemma_app.standard", res["defect"] < 1e-14 and res["positive"], {"n": 1},
                               res["defect"], False, 1e-14, samples,
                               {"z": res["witness"], "min_eigenvalue": f"{res['min_eigenvalue']:.2e}"}))
    for r in r_values:
        rng = check_rng(seed, f"lemma_app.siegel[r={r}]")
        gram = [[float(x) for x in row] for row in sg.riemann_gram(r).gram]
        worst, pos, wit = 0.0, True, None
        for _ in range(samples):
            z = sg.random_siegel_point(rng, r)
            e = sg.real_form(sg.period_basis(z, 1), gram)
            ax = sg.form_axioms(e, rng, samples=4)
            res = ks.verify_lemma_app(ax["orientation"] * e, rng, samples=4)
            pos = pos and res["positive"] and ax["orientation"] != 0
            d = max(res["defect"], res["hermitian_defect"])
            if d >= worst:
                worst, wit = d, {"Z": [[str(c) for c in row] for row in z.Z(1)]}
        records.append(CheckRecord(f"lemma_app.siegel[r={r}]", worst < 1e-12 and pos, {"r": r},
                                   worst, False, 1e-12, samples, wit))
    for fx in fixtures:
        rng = check_rng(seed, f"lemma_app.twisted.{fx.name}")
        gram = None
        worst, pos, wit = 0.0, True, None
        for _ in range(samples):
            pt = tw.random_twisted_point(rng, fx.g)
            lat = tw.build_twisted_lattice(fx.order, fx.mu, pt, digits, fx.lattice_multiplier)
            if gram is None:
                gram = [[float(x) for x in row] for row in tw.twisted_gram(lat.elements, fx.mu)]
            e = sg.real_form(lat.basis, gram)
            ax = sg.form_axioms(e, rng, samples=4)
            res = ks.verify_lemma_app(ax["orientation"] * e, rng, samples=4)
            pos = pos and res["positive"] and ax["orientation"] != 0
            d = max(res["defect"], res["hermitian_defect"])
            if d >= worst:
                worst, wit = d, {"tau": [str(t) for t in pt.tau]}
        records.append(CheckRecord(f"lemma_app.twisted.{fx.name}", worst < 1e-12 and pos, {"fixture": fx.name},
                                   worst, False, 1e-12, samples, wit))
    return records


@_timed
def ks_pairing_checks(r, points, seed):
    rng = check_rng(seed, f"ks_pairing[r={r}]")
    bad = []
    fd_max, fd_wit = 0.0, None
    directions = [(i, k) for i in range(r) for k in range(i, r)]
    for n in range(points):
        z = ks.random_rational_point(rng, r)
        for i, k in directions:
            for b in ks.verify_ks_pairing(z, i, k):
                bad.append({"point": n, "direction": [i + 1, k + 1], **b})
            fd = ks.fd_period_defect(z, i, k)
            if fd >= fd_max:
                fd_max, fd_wit = fd, {"point": n, "direction": [i + 1, k + 1]}
    params = {"r": r, "points": points, "directions": len(directions)}
    return [
        CheckRecord(f"ks_pairing.exact[r={r}]", not bad, params, None, True, None, points, bad[:5]),
        CheckRecord(f"ks_pairing.finite_difference[r={r}]", fd_max < 1e-8, params, fd_max, False, 1e-8, points,
                    fd_wit),
    ]


@_timed
def cech_checks(grid, seed):
    try:
        cover = ks.CechCoverToy(grid)
    except ks.KSError as exc:
        raise ConfigError(str(exc)) from None
    rng = check_rng(seed, f"cech[grid={grid}]")
    den = 97
    z0 = (Fraction(int(rng.integers(-den, den)), den), Fraction(int(rng.integers(-den, den)), den))
    alpha = ks.riemann_functional(z0)
    other = (Fraction(int(rng.integers(-9, 10))), Fraction(int(rng.integers(-9, 10))))
    res = ks.cech_cocycle_check(cover, alpha, other)
    zero = ks.cech_cocycle_check(cover, (0, 0))
    zero_ok = all(v == 0 for v in ks.cocycle(cover, (0, 0)).values())
    ok = not res["failures"] and res["additive"] and not zero["failures"] and zero_ok and res["triples"] > 0
    return [
        CheckRecord(
            f"cech[grid={grid}]", ok, {"grid": grid, "z0": [str(c) for c in z0]}, None, True, None,
            res["triples"], {"failures": res["failures"][:5]},
            {"overlaps": len(cover.offsets), "triples": res["triples"]},
        )
    ]


def run_suite(config):
    """Run the configured suites and return a :class:`VerificationReport`.

    Fixture problems raise :class:`~ksverify.fixtures.FixtureError` before any
    check runs.
    """
    report = VerificationReport(seed=config.seed, digits=config.digits, timing=config.timing)
    suites = set(config.suites)
    fixtures = []
    if suites & {"twisted", "lemma-app"}:
        fixtures = [load_fixture(f, digits=config.digits) for f in config.fixtures]
    records = []
    if "siegel" in suites:
        for r, g in config.siegel_shapes:
            records += siegel_checks(r, g, _n(config, 100), config.seed)
    if "twisted" in suites:
        for fx in fixtures:
            records += twisted_checks(fx, _n(config, 100), config.seed, config.digits)
    if "local" in suites:
        for p in config.primes:
            for k in config.levels:
                for case in config.local_cases:
                    records += local_checks(p, k, case)
    if "lemma-app" in suites:
        records += lemma_app_checks(config.seed, _n(config, 50), config.lemma_r, fixtures, config.digits)
    if "ks-pairing" in suites:
        for r in config.ks_r:
            records += ks_pairing_checks(r, config.ks_points, config.seed)
    if "cech" in suites:
        records += cech_checks(config.grid, config.seed)
    for rec in records:
        report.add(rec)
    return report
