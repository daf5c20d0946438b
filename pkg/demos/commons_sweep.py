"""Two-group commons: efforts, happiness and gradients as prosociality grows."""

import numpy as np

from felix import make_complete
from felix.equilibrium import toc_numeric_equilibrium
from felix.games import toc_qc, toc_two_group


def main(n: int = 100, n_c: int = 30) -> None:
    print(f"n = {n}, n_c = {n_c}, retreat point q_c = {toc_qc(n, n_c):.6f}")
    print("   q    s_c    s_d    u_c    u_d   grad_c  grad_d")
    for q in np.linspace(0, 0.9, 10):
        r = toc_two_group(n, n_c, q)
        print(f"{q:4.1f} {r.s_c:6.3f} {r.s_d:6.3f} {r.u_c:6.3f} {r.u_d:6.3f} {r.grad_c:7.3f} {r.grad_d:7.3f}")
    qs = np.r_[np.full(n_c, 0.4), np.zeros(n - n_c)]
    eq = toc_numeric_equilibrium(make_complete(n), qs)
    exact = toc_two_group(n, n_c, 0.4, form="exact").efforts()
    print(f"best-response solve at q = 0.4: {eq.sweeps} sweeps, max gap to closed form {np.max(np.abs(eq.profile - exact)):.1e}")


if __name__ == "__main__":
    main()
