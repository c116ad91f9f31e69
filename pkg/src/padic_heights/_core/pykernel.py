"""Pure-Python convolution modulo an integer, via Kronecker substitution.

Coefficients are packed into one big integer so the product is a single
CPython long multiplication (Karatsuba), then unpacked.
"""


def conv_mod(a, b, mod, n=None):
    """Coefficients of a*b reduced mod ``mod``; the first ``n`` only if given.

    Inputs must be non-negative integers below ``mod``.
    """
    la, lb = len(a), len(b)
    if not la or not lb:
        return [0] * (n or 0)
    full = la + lb - 1
    if n is None:
        n = full
    n_out = min(n, full)
    if n_out < full:
        a = a[:n_out]
        b = b[:n_out]
        la, lb = len(a), len(b)
    if min(la, lb) <= 8:
        return _schoolbook(a, b, mod, n_out) + [0] * (n - n_out)
    bits = 2 * (mod - 1).bit_length() + min(la, lb).bit_length() + 1
    nbytes = (bits + 7) // 8
    pa = int.from_bytes(b"".join(x.to_bytes(nbytes, "little") for x in a), "little")
    pb = int.from_bytes(b"".join(x.to_bytes(nbytes, "little") for x in b), "little")
    raw = (pa * pb).to_bytes(nbytes * (la + lb), "little")
    out = [int.from_bytes(raw[i * nbytes:(i + 1) * nbytes], "little") % mod for i in range(n_out)]
    return out + [0] * (n - n_out)


def _schoolbook(a, b, mod, n_out):
    out = [0] * n_out
    for i, x in enumerate(a):
        if not x or i >= n_out:
            continue
        for j in range(min(len(b), n_out - i)):
            out[i + j] += x * b[j]
    return [c % mod for c in out]
