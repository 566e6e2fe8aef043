"""Three pirate boxes and the tracing verdict for each.

The honest box was built from the user's own key. The master box
decrypts with the authority's secret. The guessing box uses a freshly
issued key from a family the authority picked at random.
"""
import sys

from aibe import MockGroup, experiments

scheme = sys.argv[1] if len(sys.argv) > 1 else "core"
env = experiments.build_env(scheme, seed=1)

for decoder, eps in (("honest", 1.0), ("noisy:0.25", 0.25), ("pkg-master", 1.0), ("pkg-guessing", 1.0)):
    rep = experiments.run_trace_experiment(scheme, 16, eps, decoder, 10, seed=2, env=env)
    print(f"{decoder:13s} L={rep.L:5d}  verdicts={dict(rep.verdicts)}")

# in a tiny group a guessing authority sometimes wins a single iteration
small = experiments.build_env(scheme, MockGroup(101), seed=3)
rate = experiments.measure_hit_rate(small, "pkg-guessing", 1010, seed=4)
print(f"guessing hit rate at p=101: {rate:.4f}  (1/p = {1 / 101:.4f})")
