"""Uniform adapters over the four scheme modules.

The CLI, the decoder models and the experiment harness talk to schemes only
through these objects, so they never branch on the scheme name themselves.
``context`` is the decoder context: ``None`` for single-recipient schemes and
the receiver set for the broadcast scheme.
"""
from __future__ import annotations

from . import cca, core, gentry, ibbe


class SchemeOps:
    name: str
    tag: int
    module = None
    traceable = True
    key_cls = None

    def setup(self, group, rng=None, **opts):
        return self.module.setup(group, rng)

    def identity(self, mpk, name) -> int:
        if isinstance(name, int):
            return name % mpk.group.order
        return mpk.group.hash_to_scalar(name)

    def user_round1(self, mpk, identity, rng=None):
        return self.module.keygen_user_round1(mpk, identity, rng)

    def user_request(self, mpk, identity, rng=None):
        return self.module.keygen_user_request(mpk, identity, rng)

    def pkg_round2(self, mpk, msk, msg, transcript, rng=None):
        return self.module.keygen_pkg_round2(mpk, msk, msg, transcript, rng)

    def pkg_respond(self, mpk, msk, request, rng=None):
        return self.module.keygen_pkg_respond(mpk, msk, request, rng)

    def user_finalize(self, mpk, state, reply, rng=None):
        return self.module.keygen_user_finalize(mpk, state, reply, rng)

    def run_ceremony(self, mpk, msk, identity, user_rng=None, pkg_rng=None):
        return self.module.run_ceremony(mpk, msk, identity, user_rng, pkg_rng)

    def keygen_direct(self, mpk, msk, identity, family, rng=None):
        return self.module.keygen_direct(mpk, msk, identity, family, rng)

    def sanity_check(self, mpk, identity, key) -> bool:
        return self.module.key_sanity_check(mpk, identity, key)

    def trace_whitebox(self, mpk, identity, key):
        return self.module.trace_whitebox(mpk, identity, key)

    def default_context(self, key):
        return None

    def encrypt(self, mpk, recipient, m, rng=None):
        return self.module.encrypt(mpk, recipient, m, rng)

    def decrypt(self, mpk, key, ct, context=None):
        return self.module.decrypt(mpk, key, ct)

    def master_decrypt(self, mpk, msk, identity, ct, context=None):
        return self.module.master_decrypt(mpk, msk, ct)

    def tracing_ciphertext(self, mpk, key, m, rng=None, context=None):
        raise NotImplementedError

    def trace(self, mpk, key, params, decoder, rng=None, context=None):
        return self.module.trace_blackbox(mpk, key, params, decoder, rng)

    def bases(self, mpk, identity):
        return mpk.pedersen_bases()


class CoreOps(SchemeOps):
    name = "core"
    tag = core.SCHEME_TAG
    module = core
    key_cls = core.UserKey

    def setup(self, group, rng=None, waters_bits=None, **opts):
        return core.setup(group, rng, waters_bits)

    def identity(self, mpk, name):
        if mpk.waters is not None:
            if isinstance(name, str) and len(name) == mpk.n_bits and not set(name) - {"0", "1"}:
                return name
            return core.waters_identity(str(name), mpk.n_bits)
        return super().identity(mpk, name)

    def tracing_ciphertext(self, mpk, key, m, rng=None, context=None):
        return core.make_tracing_ciphertext(mpk, key.identity, key, m, rng)


class CcaOps(SchemeOps):
    name = "cca"
    tag = cca.SCHEME_TAG
    module = cca
    traceable = False
    key_cls = cca.CcaUserKey

    def keygen_direct(self, mpk, msk, identity, family, rng=None):
        return cca.keygen_direct(mpk, msk, identity, family, mpk.group.random_scalar(rng), rng)

    def master_decrypt(self, mpk, msk, identity, ct, context=None):
        raise NotImplementedError("no master decryption model for the hybrid scheme")

    def trace(self, *a, **kw):
        raise NotImplementedError("black-box tracing is defined for core, gentry and ibbe")


class GentryOps(SchemeOps):
    name = "gentry"
    tag = gentry.SCHEME_TAG
    module = gentry
    key_cls = gentry.GentryKey

    def keygen_direct(self, mpk, msk, identity, family, rng=None):
        return gentry.keygen_direct(mpk, msk, identity, family)

    def master_decrypt(self, mpk, msk, identity, ct, context=None):
        return gentry.master_decrypt(mpk, msk, identity, ct)

    def tracing_ciphertext(self, mpk, key, m, rng=None, context=None):
        return gentry.make_tracing_ciphertext(mpk, key, m, rng)

    def bases(self, mpk, identity):
        return mpk.pedersen_bases(identity)


class IbbeOps(SchemeOps):
    name = "ibbe"
    tag = ibbe.SCHEME_TAG
    module = ibbe
    key_cls = ibbe.IbbeUserKey

    def setup(self, group, rng=None, N=ibbe.DEFAULT_N, **opts):
        return ibbe.setup(group, N, rng)

    def default_context(self, key):
        return (key.identity,)

    def decrypt(self, mpk, key, ct, context=None):
        return ibbe.decrypt(mpk, key, context if context is not None else self.default_context(key), ct)

    def tracing_ciphertext(self, mpk, key, m, rng=None, context=None):
        return ibbe.make_tracing_ciphertext(mpk, key, m, context, rng)

    def trace(self, mpk, key, params, decoder, rng=None, context=None):
        return ibbe.trace_blackbox(mpk, key, params, decoder, rng, context)


SCHEMES = {ops.name: ops for ops in (CoreOps(), CcaOps(), GentryOps(), IbbeOps())}
BY_TAG = {ops.tag: ops for ops in SCHEMES.values()}


def get(name_or_tag) -> SchemeOps:
    table = BY_TAG if isinstance(name_or_tag, int) else SCHEMES
    try:
        return table[name_or_tag]
    except KeyError:
        raise ValueError(f"unknown scheme {name_or_tag!r}") from None
