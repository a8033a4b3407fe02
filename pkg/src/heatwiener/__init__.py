"""Heat-kernel Wiener-lemma atom detection on the torus, SU(2) and Heisenberg nilmanifolds.

The atom power sum_x mu({x})^2 of a probability measure mu is recovered as the
small-t limit of the heat-weighted Fourier ratio

    W(t) = sum_lam num(lam) e^{-lam t} / sum_lam den(lam) e^{-lam t}

with certified spectral truncation and power-law extrapolation to t = 0.
"""

__version__ = "0.1.0"
