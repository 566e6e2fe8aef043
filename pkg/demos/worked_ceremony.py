"""Walk through one key issuance in the toy group of order 101.

Every element is printed as its discrete log, so each step can be
checked by hand.
"""
from aibe import MockGroup, Tape, core

g = MockGroup(101)
log = g.log

mpk, msk = core.setup(g, Tape([7, 13, 19, 23]))
print("authority: x=7  h=g^13  Y=g^19  Z=g^23")

ID = 5
state, msg = core.keygen_user_round1(mpk, ID, Tape([4, 6, 2, 3]))
print(f"user commits to t0=4 behind theta=6: R = g^{log(msg.R)}")

challenge = 5
transcript = core.keygen_user_respond(state, challenge)
print(f"proof answer to challenge {challenge}: z = {(transcript.z1, transcript.z2)}")

blinded = core.keygen_pkg_round2(mpk, msk, msg, transcript, Tape([1, 7]))
print(f"PKG adds its share t1={blinded.d3p}; it never sees t0")

key = core.keygen_user_finalize(mpk, state, blinded, Tape([2]))
print(f"user key: d1=g^{log(key.d1)}  d2=g^{log(key.d2)}  family={key.d3}")
print("sanity check:", core.key_sanity_check(mpk, ID, key))

m = g.target(55)
ct = core.encrypt(mpk, ID, m, Tape([9]))
print("ciphertext logs:", [log(c) for c in (ct.C1, ct.C2, ct.C3, ct.C4)])
print("decrypts to e^%d" % log(core.decrypt(mpk, key, ct)))

# a tracing ciphertext only opens under the same family
tr = core.make_tracing_ciphertext(mpk, ID, key, m, Tape([9, 4]))
other = core.keygen_direct(mpk, msk, ID, 12, Tape([3]))
print("same family opens tracing ciphertext:", core.decrypt(mpk, key, tr) == m)
print("family 12 opens it:", core.decrypt(mpk, other, tr) == m)
