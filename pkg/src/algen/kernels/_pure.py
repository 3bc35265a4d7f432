"""Pure-Python kernels. Reference semantics for the compiled twin in _ext.pyx."""

from bisect import bisect_left


def mul_packed(a_keys, a_degs, a_coefs, b_keys, b_degs, b_coefs, cap):
    """Sparse product of two integer polynomials with packed monomial keys.

    Keys are integers whose bit fields hold the exponents; the caller picks
    field widths wide enough that adding two keys never carries. ``b_degs``
    must be sorted ascending. With ``cap >= 0`` only products whose degree
    ``a_deg + b_deg`` is below ``cap`` are kept. Returns ``{key: coef}``,
    possibly containing zero coefficients.
    """
    out = {}
    get = out.get
    nb = len(b_keys)
    for ka, da, ca in zip(a_keys, a_degs, a_coefs):
        if cap >= 0:
            m = bisect_left(b_degs, cap - da)
        else:
            m = nb
        for j in range(m):
            k = ka + b_keys[j]
            out[k] = get(k, 0) + ca * b_coefs[j]
    return out


def echelon(rows, ncols):
    """Fraction-free Gauss-Jordan elimination (Bareiss/Montante) in place.

    ``rows`` is a list of integer lists. On return the first ``rank`` rows are
    the pivot rows; every pivot entry equals the returned ``pivot`` value and
    all other entries in pivot columns are zero. The pivot in each column is
    the candidate with the smallest bit length. Returns ``(pivot_cols, pivot)``.
    """
    nrows = len(rows)
    r = 0
    prev = 1
    pivot_cols = []
    for c in range(ncols):
        if r == nrows:
            break
        best = -1
        best_bits = 0
        for i in range(r, nrows):
            v = rows[i][c]
            if v:
                bits = abs(v).bit_length()
                if best < 0 or bits < best_bits:
                    best = i
                    best_bits = bits
        if best < 0:
            continue
        if best != r:
            rows[r], rows[best] = rows[best], rows[r]
        prow = rows[r]
        p = prow[c]
        for i in range(nrows):
            if i == r:
                continue
            row = rows[i]
            f = row[c]
            if f:
                for j in range(ncols):
                    row[j] = (p * row[j] - f * prow[j]) // prev
            elif p != prev:
                for j in range(ncols):
                    if row[j]:
                        row[j] = (p * row[j]) // prev
        prev = p
        pivot_cols.append(c)
        r += 1
    return pivot_cols, prev
