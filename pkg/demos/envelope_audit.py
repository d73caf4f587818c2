"""Monte-Carlo worst-case audit against the analytic rate envelope.

Each variance-reduced method is run over a grid of adversarial instance
parameters; the worst mean error per oracle call must stay above the
geometric envelope that no oblivious method can beat.  A reduced version
of the full audit (fewer seeds) so it finishes in seconds.
"""

from lblab import harness

cfg = harness.load_config(None, family="fsm", n=8, d=4, L=100.0, mu=1.0,
                          grid_points=17, iterations=120, seeds=30,
                          optimizers=("sag", "saga", "svrg"))
code, csv = harness.cmd_envelope(cfg)

lines = csv.splitlines()
print(lines[1])
for line in lines[2::40]:
    print(line)
print(f"\nexit code {code} (0 = the envelope was never crossed)")
