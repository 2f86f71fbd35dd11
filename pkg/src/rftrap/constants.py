"""Physical constants (SI) shared across the toolkit."""

from scipy import constants as _codata

ELEMENTARY_CHARGE = _codata.e           # C
ATOMIC_MASS_UNIT = 1.66053906660e-27    # kg
HBAR = _codata.hbar                     # J s
ELECTRON_VOLT = _codata.electron_volt   # J


def joules_to_ev(energy):
    return energy / ELECTRON_VOLT


def ev_to_joules(energy_ev):
    return energy_ev * ELECTRON_VOLT
