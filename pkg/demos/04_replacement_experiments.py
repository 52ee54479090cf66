# %% [markdown]
# # Replacing the channels
#
# Swapping the gain for a second loss channel leaves both modes relaxing to
# the vacuum: the covariance stays at the identity and no correlations are
# ever produced. With gain on both modes correlations do build up when the
# rates differ, but they die out again as both modes heat up. Equal gain
# rates keep the covariance proportional to the identity, so that case
# stays uncorrelated as well.

# %%
import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from ptdiscord import Channel, SystemParams, asymptotic_correlations, correlation_series

OUT = os.path.join(os.path.dirname(os.path.abspath(__file__)), "figures")
os.makedirs(OUT, exist_ok=True)

configs = {
    "loss/loss": SystemParams(rate_L=1.0, rate_G=0.5, kind_L=Channel.LOSS, kind_G=Channel.LOSS),
    "gain/gain, equal": SystemParams(rate_L=0.5, rate_G=0.5, kind_L=Channel.GAIN, kind_G=Channel.GAIN),
    "gain/gain, unequal": SystemParams(rate_L=1.5, rate_G=0.5, kind_L=Channel.GAIN, kind_G=Channel.GAIN),
}

# %%
fig, ax = plt.subplots(figsize=(5.5, 3.8))
for name, p in configs.items():
    rows = list(correlation_series(p, 20.0, stride=0.05))
    t = np.array([r[0] for r in rows])
    d = np.array([max(r[1].discord_GL, r[1].discord_LG) for r in rows])
    ax.plot(t, d, label=name)
    res = asymptotic_correlations(p)
    print(f"{name:20s} peak={d.max():.3e} at t={t[d.argmax()]:.2f}, fate={res.classification.value}")
ax.set(xlabel="g t", ylabel="max(D_GL, D_LG)")
ax.legend()
fig.tight_layout()
fig.savefig(os.path.join(OUT, "replacement.png"), dpi=120)
