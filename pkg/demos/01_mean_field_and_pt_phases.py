# %% [markdown]
# # Mean field and PT phases
#
# The mode amplitudes obey a non-Hermitian Schroedinger equation with
# generator ``[[-i gamma_L, g], [g, i gamma_G]]``. On the PT line
# ``gamma_L = gamma_G = gamma`` its eigenvalues are ``+-sqrt(g^2 - gamma^2)``.
# They are real below ``g`` (exact phase), coalesce at ``g`` (exceptional
# point) and turn into an imaginary pair above it (broken phase).

# %%
import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from ptdiscord import SystemParams, mean_field_spectrum, propagate_mean_field

OUT = os.path.join(os.path.dirname(os.path.abspath(__file__)), "figures")
os.makedirs(OUT, exist_ok=True)

# %%
gammas = np.linspace(0.01, 3.0, 300)
spectra = np.array([mean_field_spectrum(SystemParams.gain_loss(x, x))[0] for x in gammas])
classes = [mean_field_spectrum(SystemParams.gain_loss(x, x))[1].value for x in (0.5, 1.0, 1.5)]
print("PT class at gamma = 0.5, 1, 1.5:", classes)

fig, ax = plt.subplots(1, 2, figsize=(9, 3.5), sharex=True)
ax[0].plot(gammas, spectra.real, "k.", ms=2)
ax[0].set(xlabel="gamma / g", ylabel="Re eps / g")
ax[1].plot(gammas, spectra.imag, "k.", ms=2)
ax[1].set(xlabel="gamma / g", ylabel="Im eps / g")
fig.tight_layout()
fig.savefig(os.path.join(OUT, "pt_spectrum.png"), dpi=120)

# %% [markdown]
# Starting from a coherent state in the lossy mode, the populations
# oscillate in the exact phase, grow linearly in time at the exceptional
# point and grow exponentially in the broken phase.

# %%
t = np.linspace(0.0, 15.0, 400)
fig, ax = plt.subplots(figsize=(5, 3.5))
for gamma in (0.5, 1.0, 1.5):
    p = SystemParams.gain_loss(gamma, gamma)
    n = np.array([np.sum(np.abs(propagate_mean_field([1.0, 0.0], p, s).psi) ** 2) for s in t])
    ax.semilogy(t, n, label=f"gamma = {gamma} g")
ax.set(xlabel="g t", ylabel="|a_L|^2 + |a_G|^2")
ax.legend()
fig.tight_layout()
fig.savefig(os.path.join(OUT, "mean_field_norm.png"), dpi=120)
