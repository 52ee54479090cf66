# %% [markdown]
# # Phase diagram of the asymptotic discord
#
# Finite asymptotic discord appears above the threshold
# ``gamma_th = min(gamma_G, g^2 / gamma_G)``. Below ``g`` the threshold is the
# PT line, above it the hyperbola ``gamma_G gamma_L = g^2``. The fully stable
# region (a stationary state exists) is the wedge ``gamma_L > gamma_G`` under
# the hyperbola; outside it the covariance diverges but the discord can
# still saturate.
#
# A 30x30 scan takes about half a minute on one core; set
# ``PTDISCORD_THREADS`` to use more processes.

# %%
import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from ptdiscord import GridSpec, phase_scan, threshold_curve

OUT = os.path.join(os.path.dirname(os.path.abspath(__file__)), "figures")
os.makedirs(OUT, exist_ok=True)

# %%
tab = phase_scan(GridSpec(gamma_max=3.0, n=30))
with open(os.path.join(OUT, "scan30.json"), "w") as fh:
    fh.write(tab.to_json())
counts = {c: int(np.sum(tab.classification == c)) for c in ("decayed", "saturated", "undetermined")}
print(counts)

# %%
extent = (0, 3, 0, 3)
fig, ax = plt.subplots(1, 2, figsize=(10, 4.2))
for a, key in zip(ax, ("discord_GL_inf", "discord_LG_inf")):
    im = a.imshow(getattr(tab, key).T, origin="lower", extent=extent, cmap="Greys", vmin=0)
    gg = np.linspace(0.02, 3, 300)
    a.plot(gg, [threshold_curve(x) for x in gg], "r-", lw=1, label="gamma_th")
    a.set(xlabel="gamma_G / g", ylabel="gamma_L / g", title=key, xlim=(0, 3), ylim=(0, 3))
    fig.colorbar(im, ax=a)
ax[0].legend(loc="upper right")
fig.tight_layout()
fig.savefig(os.path.join(OUT, "phase_diagram.png"), dpi=120)

# %% [markdown]
# Along the PT line the discord with measurement on G has an interior
# maximum, while the one with measurement on L grows monotonically.

# %%
from ptdiscord import pt_line_profile

prof = pt_line_profile(np.linspace(1.05, 3.0, 40))
fig, ax = plt.subplots(figsize=(5, 3.5))
ax.plot(prof[:, 0], prof[:, 1], label="D_GL")
ax.plot(prof[:, 0], prof[:, 2], label="D_LG")
ax.set(xlabel="gamma / g", ylabel="asymptotic discord")
ax.legend()
fig.tight_layout()
fig.savefig(os.path.join(OUT, "pt_line_profile.png"), dpi=120)
print("D_GL maximum at gamma =", prof[prof[:, 1].argmax(), 0])
