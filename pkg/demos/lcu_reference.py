"""The cos^2m filter as a truncated sum of time evolutions.

cos^2m(H') expands exactly into binomially weighted evolutions
e^{-2iH'k}, k = -m..m.  Keeping only |k| <= m0 trades circuit count for a
controlled tail error.  This script shows the coefficient window, how the
tail shrinks as the window widens, and that the truncated operator filters
a trial state onto the ground state with predictable success probability.
"""

import numpy as np

from nucsim import (PauliHamiltonian, apply_cos_filter, ground_state,
                    lcu_coefficients, lcu_reference,
                    lcu_success_probability, shift_rescale)


def main() -> None:
    exp = lcu_coefficients(1)
    print(f"m=1 window: {exp.coeffs.tolist()} (the binomial row (1,2,1)/4)")

    print("\ntail mass vs window radius at m=48")
    for tol in (1e-1, 1e-2, 1e-4, 1e-8):
        e = lcu_coefficients(48, tail_tol=tol)
        print(f"  tol={tol:<8g} m0={e.m0:>2}  tail={e.tail_mass:.3e} "
              f"({2 * e.m0 + 1} evolutions instead of {2 * e.m + 1})")

    h = PauliHamiltonian(2, {"ZI": 0.7, "IZ": 0.3, "XX": 0.25})
    gs = ground_state(h)
    spread = float(gs.spectrum[-1] - gs.energy)
    shifted = shift_rescale(h, gs.energy, spread / (np.pi / 4))
    print(f"\nrescaled spectrum: "
          f"{[round(float(e), 4) for e in ground_state(shifted).spectrum]}")

    trial = np.zeros(4, dtype=complex)
    trial[0] = 1.0              # |00>, imperfect overlap with the ground state
    overlap0 = abs(np.vdot(gs.vector, trial)) ** 2
    print(f"trial overlap with ground state: {overlap0:.4f}")

    m = 24
    exp = lcu_coefficients(m, tail_tol=1e-6)
    filtered = lcu_reference(shifted, exp, trial)
    filtered /= np.linalg.norm(filtered)
    exact = apply_cos_filter(shifted, m, trial)
    print(f"\nafter the m={m} filter (window m0={exp.m0})")
    print(f"  overlap with ground state : {abs(np.vdot(gs.vector, filtered)) ** 2:.6f}")
    print(f"  |truncated - exact| (max) : {np.max(np.abs(filtered - exact)):.2e}")
    print(f"  success probability       : "
          f"{lcu_success_probability(shifted, exp, trial):.4f}")


if __name__ == "__main__":
    main()
