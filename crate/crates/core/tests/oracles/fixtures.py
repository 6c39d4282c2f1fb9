"""Independent numpy oracle for the frozen fixtures in tests/acceptance.rs.

Run: python3 fixtures.py
"""
import numpy as np

REL = 1e-10


def null_basis(F):
    J, K = F.shape
    Fp = np.vstack([F, np.zeros((max(K - J, 0), K))]) if K > J else F
    U, s, Vh = np.linalg.svd(Fp)
    r = int((s > REL * s[0]).sum()) if s.size and s[0] > 0 else 0
    return Vh[r:].conj().T


def shift_residual_zero_fill(F):
    N = null_basis(F)
    if N.shape[1] == 0:
        return 0.0
    S = np.vstack([np.zeros((1, N.shape[1])), N[:-1]])
    R = S - N @ (N.conj().T @ S)
    return np.linalg.norm(R, 2)


def min_norm_t(F):
    H, Tl = F[:, :-1], F[:, 1:]
    return Tl @ np.linalg.pinv(H, rcond=REL)


def thirds_interleaving(cells, cell_len, n):
    L = cells * cell_len
    t = np.arange(L)
    g = np.zeros(L)
    g[:cell_len] = 1 / np.sqrt(cell_len)

    def el(k, m, nn):
        return np.exp(2j * np.pi * (k * cells // 3 + m * cells) * t / L) * np.roll(g, nn * cell_len)

    odd = [el(0, m, nn) for nn in range(cells) for m in range(cell_len)]
    even = [el(k, m, nn) for nn in range(cells) for m in range(cell_len) for k in (1, 2)]
    cols = [even[p // 2] if p % 2 == 0 else odd[p // 2] for p in range(n)]
    return np.array(cols).T


def alternating_dft(ambient, n):
    D = ambient
    t = np.arange(D)
    cols = []
    for j in range(n // 2 + 1):
        e = np.zeros(D, complex)
        e[j] = 1
        cols += [e, np.exp(2j * np.pi * j * t / D) / np.sqrt(D)]
    return np.array(cols[:n]).T


def aldroubi(J, K):
    j = np.arange(1, J + 1)
    lam = 1 - 2.0 ** (-j)
    g = np.sqrt(2.0 ** (-j) * (2 - 2.0 ** (-j)))
    return np.array([lam ** k * g for k in range(K)]).T


def tail_bound(F, n, m):
    U, s, _ = np.linalg.svd(F, full_matrices=False)
    r = int((s > REL * s[0]).sum())
    Q = U[:, :r]
    idx = list(range(n + 1)) + list(range(m, F.shape[1]))
    c = np.linalg.svd(Q.conj().T @ F[:, idx], compute_uv=False)
    if c.size < r or c[r - 1] <= REL * s[0]:
        return 0.0
    return c[r - 1] ** 2


if __name__ == "__main__":
    for n in (48, 96, 192):
        print("thirds shift residual", n, repr(shift_residual_zero_fill(thirds_interleaving(24, 4, n))))
    for n in (32, 64, 128):
        print("alternating dft norm", n, repr(np.linalg.norm(min_norm_t(alternating_dft(512, n)), 2)))
    for J in (100, 200, 400):
        F = aldroubi(J, J)
        s = np.linalg.svd(F, compute_uv=False)
        r = int((s > REL * s[0]).sum())
        print("aldroubi", J, "rank", r, "A", repr(s[r - 1] ** 2), "B", repr(s[0] ** 2),
              "norm T", repr(np.linalg.norm(min_norm_t(F), 2)))
    F = aldroubi(200, 200)
    for m in (10, 20, 40):
        print("aldroubi tail", m, repr(tail_bound(F, 5, m)))
