"""Broadcast to a receiver set on the pairing curve, then tamper with a key."""
import random

from aibe import BLS12381Group, ibbe

g = BLS12381Group()
rng = random.Random(2024)
mpk, msk = ibbe.setup(g, 4, rng)

names = {"alice": 11, "bob": 22, "carol": 33}
keys = {n: ibbe.run_ceremony(mpk, msk, i, rng, rng) for n, i in names.items()}

S = [names["alice"], names["bob"]]
m = g.random_target(rng)
ct = ibbe.encrypt(mpk, S, m, rng)
for n in ("alice", "bob"):
    print(n, "reads the broadcast:", ibbe.decrypt(mpk, keys[n], S, ct) == m)
try:
    ibbe.decrypt(mpk, keys["carol"], S, ct)
except ibbe.ReceiverSetError as exc:
    print("carol is refused:", exc)

k = keys["alice"]
T = list(k.T)
T[1] = T[1] * g.g
bad = ibbe.IbbeUserKey(k.K1, k.K2, tuple(T), k.t_id, k.identity)
try:
    ibbe.key_check(mpk, names["alice"], bad)
except ibbe.KeyCheckError as exc:
    print("tampered key rejected at delegation index", exc.index)
