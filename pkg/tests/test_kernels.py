import random

import pytest

from algen import kernels
from algen.kernels import _pure

BACKENDS = kernels.backends()


def naive_mul(a_keys, a_coefs, b_keys, b_coefs):
    out = {}
    for ka, ca in zip(a_keys, a_coefs):
        for kb, cb in zip(b_keys, b_coefs):
            out[ka + kb] = out.get(ka + kb, 0) + ca * cb
    return out


def test_backend_selected():
    assert kernels.BACKEND in ("cython", "python")
    assert "python" in BACKENDS


@pytest.mark.parametrize("name", sorted(BACKENDS))
@pytest.mark.parametrize("seed", range(5))
def test_mul_packed_matches_naive(name, seed):
    mod = BACKENDS[name]
    rng = random.Random(seed)
    n = rng.randint(0, 30)
    a_keys = [rng.randrange(1 << 20) for _ in range(n)]
    a_coefs = [rng.randint(-10 ** 20, 10 ** 20) for _ in range(n)]
    b = sorted((rng.randrange(20), rng.randrange(1 << 20), rng.randint(-9, 9)) for _ in range(n))
    b_degs = [x[0] for x in b]
    b_keys = [x[1] for x in b]
    b_coefs = [x[2] for x in b]
    a_degs = [rng.randrange(20) for _ in range(n)]
    got = {k: v for k, v in mod.mul_packed(a_keys, a_degs, a_coefs, b_keys, b_degs, b_coefs, -1).items() if v}
    want = {k: v for k, v in naive_mul(a_keys, a_coefs, b_keys, b_coefs).items() if v}
    assert got == want
    cap = 15
    got = {k: v for k, v in mod.mul_packed(a_keys, a_degs, a_coefs, b_keys, b_degs, b_coefs, cap).items() if v}
    want = {}
    for ka, da, ca in zip(a_keys, a_degs, a_coefs):
        for kb, db, cb in zip(b_keys, b_degs, b_coefs):
            if da + db < cap:
                want[ka + kb] = want.get(ka + kb, 0) + ca * cb
    assert got == {k: v for k, v in want.items() if v}


@pytest.mark.parametrize("name", sorted(BACKENDS))
def test_echelon_shape(name):
    mod = BACKENDS[name]
    rows = [[2, 4, 6], [1, 2, 3], [0, 1, 5]]
    piv, p = mod.echelon(rows, 3)
    assert piv == [0, 1]
    for r, c in enumerate(piv):
        assert rows[r][c] == p
        for rr in range(3):
            if rr != r:
                assert rows[rr][c] == 0
    assert rows[2] == [0, 0, 0]


@pytest.mark.parametrize("seed", range(8))
def test_backends_agree_on_echelon(seed):
    rng = random.Random(seed)
    m, n = rng.randint(1, 7), rng.randint(1, 7)
    rows = [[rng.randint(-5, 5) for _ in range(n)] for _ in range(m)]
    outs = []
    for mod in BACKENDS.values():
        work = [r[:] for r in rows]
        outs.append((mod.echelon(work, n), work))
    assert all(o == outs[0] for o in outs)
    # the fallback is the reference
    work = [r[:] for r in rows]
    assert (_pure.echelon(work, n), work) == outs[0]
