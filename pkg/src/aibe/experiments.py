"""Statistical harness around black-box tracing and the issuance algebra.

Everything takes an explicit integer seed; per-trial randomness is derived
from it by hashing, so any single trial can be replayed on its own.
"""
from __future__ import annotations

import csv
import hashlib
import io
import json
import random
import time
from collections import Counter
from dataclasses import dataclass, field

from . import core, decoders, gentry, schemes
from .groups import BilinearGroup, MockGroup, context_new
from .trace import PKG, USER, TraceParams


def derive_seed(seed: int, *labels) -> int:
    h = hashlib.sha256(str(seed).encode())
    for label in labels:
        h.update(b"/" + str(label).encode())
    return int.from_bytes(h.digest()[:16], "big")


def seeded_rng(seed: int, *labels) -> random.Random:
    return random.Random(derive_seed(seed, *labels))


@dataclass
class TraceEnv:
    """One authority, one honestly issued key, and the tracing context."""
    ops: schemes.SchemeOps
    group: BilinearGroup
    mpk: object
    msk: object
    key: object
    context: tuple | None = None

    @property
    def identity(self):
        return self.key.identity


def build_env(scheme: str, group: BilinearGroup | None = None, seed: int = 0,
              identity="alice", context=None, **setup_opts) -> TraceEnv:
    ops = schemes.get(scheme)
    group = group or context_new("mock", p=2 ** 61 - 1)
    mpk, msk = ops.setup(group, seeded_rng(seed, "setup"), **setup_opts)
    ident = ops.identity(mpk, identity)
    key = ops.run_ceremony(mpk, msk, ident, seeded_rng(seed, "user"), seeded_rng(seed, "pkg"))
    if context is None:
        context = ops.default_context(key)
    return TraceEnv(ops, group, mpk, msk, key, context)


def make_decoder(env: TraceEnv, decoder, seed: int = 0) -> decoders.Decoder:
    """Accept a decoder, a factory ``f(env)`` or a spec string like ``builtin:noisy:0.25``."""
    if isinstance(decoder, decoders.Decoder):
        return decoder
    if isinstance(decoder, str):
        if not decoder.startswith(("builtin:", "exec:")):
            decoder = "builtin:" + decoder
        return decoders.from_spec(decoder, env.ops, env.mpk, env.key, env.msk, seed)
    return decoder(env)


@dataclass
class TrialResult:
    trial: int
    verdict: str
    ctr: int
    seed: int


@dataclass
class ExperimentReport:
    scheme: str
    lam: int
    epsilon: float
    decoder: str
    seed: int
    L: int
    results: list[TrialResult] = field(default_factory=list)
    wall_clock: float = 0.0

    @property
    def trials(self) -> int:
        return len(self.results)

    @property
    def verdicts(self) -> Counter:
        c = Counter({PKG: 0, USER: 0})
        c.update(r.verdict for r in self.results)
        return c

    @property
    def ctr_histogram(self) -> Counter:
        return Counter(r.ctr for r in self.results)

    @property
    def hit_rate(self) -> float:
        return sum(r.ctr for r in self.results) / (self.L * self.trials) if self.results else 0.0

    def add(self, result: TrialResult):
        # results may arrive in any order; keep them sorted for stable output
        self.results.append(result)
        self.results.sort(key=lambda r: r.trial)

    def summary(self) -> dict:
        return {
            "scheme": self.scheme, "lambda": self.lam, "epsilon": self.epsilon,
            "decoder": self.decoder, "seed": self.seed, "L": self.L, "trials": self.trials,
            "verdicts": dict(self.verdicts), "hit_rate": self.hit_rate,
            "ctr_histogram": {str(k): v for k, v in sorted(self.ctr_histogram.items())},
            "wall_clock": round(self.wall_clock, 4),
        }

    def to_jsonl(self) -> str:
        lines = [json.dumps({"type": "summary", **self.summary()})]
        lines += [json.dumps({"type": "trial", **vars(r)}) for r in self.results]
        return "\n".join(lines) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["trial", "verdict", "ctr", "seed"])
        for r in self.results:
            w.writerow([r.trial, r.verdict, r.ctr, r.seed])
        return buf.getvalue()


def run_trace_experiment(scheme: str, lam: int, epsilon: float, decoder, trials: int, seed: int,
                         group: BilinearGroup | None = None, env: TraceEnv | None = None) -> ExperimentReport:
    """Run ``trials`` independent black-box traces against one decoder."""
    params = TraceParams(lam, epsilon)
    env = env or build_env(scheme, group, seed)
    dec = make_decoder(env, decoder, derive_seed(seed, "decoder"))
    if not dec.stateless:
        raise ValueError("trace experiments need a stateless decoder")
    report = ExperimentReport(env.ops.name, lam, epsilon, dec.name, seed, params.iterations)
    start = time.perf_counter()
    for t in range(trials):
        tseed = derive_seed(seed, "trial", t)
        out = env.ops.trace(env.mpk, env.key, params, dec, random.Random(tseed), env.context)
        report.add(TrialResult(t, out.culprit, out.ctr, tseed))
    report.wall_clock = time.perf_counter() - start
    return report


def measure_hit_rate(env: TraceEnv, decoder, n: int, seed: int, tracing: bool = True) -> float:
    """Fraction of ``n`` fresh ciphertexts the decoder decrypts correctly.

    ``tracing=False`` uses honestly generated ciphertexts instead.
    """
    dec = make_decoder(env, decoder, derive_seed(seed, "decoder"))
    rng = seeded_rng(seed, "hit-rate")
    hits = 0
    for _ in range(n):
        ct, m = _probe(env, rng, tracing)
        if dec(ct, env.context) == m:
            hits += 1
    return hits / n


def _probe(env, rng, tracing):
    m = env.group.random_target(rng)
    if tracing:
        return env.ops.tracing_ciphertext(env.mpk, env.key, m, rng, env.context), m
    recipient = env.context if env.ops.name == "ibbe" else env.identity
    return env.ops.encrypt(env.mpk, recipient, m, rng), m


def replay_audit(env: TraceEnv, decoder, n: int, seed: int) -> bool:
    """Statelessness check: answers to a shuffled replay must match query by query."""
    dec = make_decoder(env, decoder, derive_seed(seed, "decoder"))
    rng = seeded_rng(seed, "replay")
    queries = [_probe(env, rng, True)[0] for _ in range(n)]
    first = [dec(ct, env.context) for ct in queries]
    order = list(range(n))
    rng.shuffle(order)
    second = {i: dec(queries[i], env.context) for i in order}
    return all(first[i] == second[i] for i in range(n))


# -- FindKey view audit ---------------------------------------------------------

@dataclass
class PkgView:
    """Everything the PKG sees of the commitment phase of one ceremony."""
    base_a: int
    base_b: int | None  # None for the straw-man commitment a^t0
    R: int
    announcement: int
    challenge: int
    z1: int
    z2: int


@dataclass
class AuditReport:
    scheme: str
    views: int
    candidates: int
    consistent_views: int
    failures: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.views > 0 and self.consistent_views == self.views


def _consistent_candidates(group: MockGroup, view: PkgView) -> int:
    """Count t0' in Z_p* admitting a full opening (theta', k1', k2') of the view."""
    p = group.order
    a = group.source(view.base_a)
    b = group.source(view.base_b) if view.base_b is not None else None
    R, A = group.source(view.R), group.source(view.announcement)
    c = view.challenge
    ok = 0
    for t0 in range(1, p):
        if b is None:
            theta = 0
        else:
            theta = (view.R - t0 * view.base_a) * group.inv(view.base_b) % p
        k1, k2 = (view.z1 - c * t0) % p, (view.z2 - c * theta) % p
        opening = a ** t0 * (b ** theta if b is not None else group.identity())
        nonces = a ** k1 * (b ** k2 if b is not None else group.identity())
        if opening == R and nonces == A:
            ok += 1
    return ok


def _ceremony_view(ops, group, mpk, identity, rng) -> PkgView:
    state, msg = ops.user_round1(mpk, identity, rng)
    c = group.random_scalar(rng)
    tr = state.prover.transcript(c)
    bases = ops.bases(mpk, identity)
    log = group.log
    return PkgView(log(bases.base_a), log(bases.base_b), log(msg.R), log(tr.announcement), c, tr.z1, tr.z2)


def _straw_man_view(ops, group, mpk, identity, rng) -> PkgView:
    # the scheme's first base alone with a Schnorr proof: theta forced to 0
    a = ops.bases(mpk, identity).base_a
    t0, k = group.random_scalar(rng), group.random_scalar(rng)
    c = group.random_scalar(rng)
    log = group.log
    return PkgView(log(a), None, log(a ** t0), log(a ** k), c, (k + c * t0) % group.order, 0)


def run_findkey_view_audit(scheme: str, trials: int, seed: int = 0, p: int = 101,
                           straw_man: bool = False) -> AuditReport:
    """Check that every PKG view is consistent with every candidate family share."""
    group = MockGroup(p)
    ops = schemes.get(scheme)
    rng = seeded_rng(seed, "audit", scheme)
    mpk, _ = ops.setup(group, rng)
    report = AuditReport(scheme + (" (straw man)" if straw_man else ""), 0, p - 1, 0)
    for i in range(trials):
        build = _straw_man_view if straw_man else _ceremony_view
        view, attempt = None, 0
        while view is None:
            identity = ops.identity(mpk, f"user-{i}-{attempt}")
            try:
                view = build(ops, group, mpk, identity, rng)
            except gentry.IssuanceAborted:
                attempt += 1  # identity hit alpha, probability 1/p

        n = _consistent_candidates(group, view)
        report.views += 1
        if n == p - 1:
            report.consistent_views += 1
        else:
            report.failures.append((i, n))
    return report


# -- CDH extraction algebra -----------------------------------------------------

def cdh_trapdoor_setup(group: BilinearGroup, identity: int, rng=None, x=None, h=None, Y=None, alpha=None):
    """Core-scheme authority with ``Z = g^-ID X^alpha``, as the reduction builds it.

    Returns ``(mpk, msk, alpha)``.
    """
    x = x if x is not None else group.random_scalar(rng)
    alpha = alpha if alpha is not None else group.random_scalar(rng)
    h = h if h is not None else group.random_source(rng)
    Y = Y if Y is not None else group.random_source(rng)
    X = group.g ** x
    Z = group.g ** (-identity) * X ** alpha
    return core.MasterPublicKey(group, X, Y, Z, h), core.MasterSecretKey(x), alpha


def cdh_extract_check(mpk: core.MasterPublicKey, alpha: int, identity: int,
                      key_a: core.UserKey, key_b: core.UserKey, expected=None):
    """Combine two keys of distinct families into ``h^{1/x}``.

    With ``F(ID) = X^alpha`` each ``d1 d2^-alpha`` equals ``(Y h^t)^{1/x}``;
    dividing the two cancels Y.  If ``expected`` is given the result is
    compared against it.
    """
    grp = mpk.group
    if (key_a.d3 - key_b.d3) % grp.order == 0:
        raise ValueError("extraction needs keys of distinct families")
    if not (core.key_sanity_check(mpk, identity, key_a) and core.key_sanity_check(mpk, identity, key_b)):
        raise ValueError("extraction needs two valid keys")
    ua = key_a.d1 / key_a.d2 ** alpha
    ub = key_b.d1 / key_b.d2 ** alpha
    out = (ua / ub) ** grp.inv(key_a.d3 - key_b.d3)
    if expected is not None and out != expected:
        raise AssertionError("extracted element differs from h^(1/x)")
    return out
