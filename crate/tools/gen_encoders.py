#!/usr/bin/env python3
"""Derives the benchmark encoder circuits.

For each target [[n,k,d]] the script
  1. factors x^n - 1 over GF(4) and looks for a cyclic GF(4)-linear code
     C = <g(x)> of dimension (n-k)/2 that is Hermitian self-orthogonal;
  2. turns C into a stabilizer group (GF(4) element a*w + b*w^2 is the Pauli
     with x-bit a and z-bit b);
  3. checks the minimum distance by enumerating every logical operator;
  4. writes a standard-form encoder (H on pivot qubits, controlled Paulis
     from the pivots, CNOTs from the input qubits) in the QASM subset;
  5. simulates the circuit on a stabilizer tableau and checks that it
     prepares exactly the code's stabilizer group.

Usage: gen_encoders.py OUT_DIR            write all encoders
       gen_encoders.py --check FILE.qasm  report what a listing encodes
"""
import itertools
import sys

import numpy as np

# ---------------------------------------------------------------- GF(4)
# 0, 1, w, w^2 encoded as 0, 1, 2, 3; addition is XOR.
EXP = [1, 2, 3]
LOG = {1: 0, 2: 1, 3: 2}


def gmul(a, b):
    if a == 0 or b == 0:
        return 0
    return EXP[(LOG[a] + LOG[b]) % 3]


def gconj(a):
    return gmul(a, a)


def ginv(a):
    return EXP[(-LOG[a]) % 3]


def ptrim(p):
    while p and p[-1] == 0:
        p = p[:-1]
    return p


def pmul(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] ^= gmul(x, y)
    return ptrim(out)


def pdivmod(a, b):
    a = list(a)
    q = [0] * max(len(a) - len(b) + 1, 1)
    lead = ginv(b[-1])
    while len(a) >= len(b) and a:
        shift = len(a) - len(b)
        f = gmul(a[-1], lead)
        q[shift] = f
        for i, y in enumerate(b):
            a[i + shift] ^= gmul(f, y)
        a = ptrim(a)
    return ptrim(q), a


def factor_xn1(n):
    """Irreducible factors (with multiplicity) of x^n - 1 over GF(4)."""
    rest = [1] + [0] * (n - 1) + [1]
    factors = []
    d = 1
    while len(rest) - 1 >= 2 * d:
        found = False
        for tail in itertools.product(range(4), repeat=d):
            cand = list(tail) + [1]
            if cand[0] == 0:
                continue
            q, r = pdivmod(rest, cand)
            if not r:
                factors.append(cand)
                rest = q
                found = True
                break
        if not found:
            d += 1
    if len(rest) > 1:
        factors.append(rest)
    return factors


# ------------------------------------------------------- Pauli algebra
# A Pauli on n qubits is an int: x-bits in 0..n-1, z-bits in n..2n-1.


def pauli_from_gf4(vec, n):
    v = 0
    for i, e in enumerate(vec):
        if e in (2, 1):  # w or 1 carry an x-bit
            v |= 1 << i
        if e in (3, 1):  # w^2 or 1 carry a z-bit
            v |= 1 << (n + i)
    return v


def symp(a, b, n):
    m = (1 << n) - 1
    return (bin((a & m) & (b >> n)).count("1") + bin((a >> n) & (b & m)).count("1")) % 2


def weight(v, n):
    m = (1 << n) - 1
    return bin((v & m) | (v >> n)).count("1")


def pauli_str(v, n):
    s = ""
    for i in range(n):
        x, z = (v >> i) & 1, (v >> (n + i)) & 1
        s += "IXZY"[x + 2 * z]
    return s


def rank(rows):
    rows = [r for r in rows if r]
    basis = []
    for r in rows:
        for b in basis:
            r = min(r, r ^ b)
        if r:
            basis.append(r)
    return len(basis)


def reduce_basis(rows):
    basis = []
    for r in rows:
        for b in basis:
            r = min(r, r ^ b)
        if r:
            basis.append(r)
            basis.sort(reverse=True)
    return basis


def in_span(v, basis):
    for b in sorted(basis, reverse=True):
        v = min(v, v ^ b)
    return v == 0


def normalizer(stabs, n):
    """Basis of all Paulis commuting with every stabilizer."""
    # Solve symp(s, v) = 0: with s' = swap(s), this is <s', v> = 0.
    m = (1 << n) - 1
    rows = [((s & m) << n) | (s >> n) for s in stabs]
    pivots = {}
    for r in rows:
        for col, pr in pivots.items():
            if (r >> col) & 1:
                r ^= pr
        if r:
            col = r.bit_length() - 1
            for c2 in list(pivots):
                if (pivots[c2] >> col) & 1:
                    pivots[c2] ^= r
            pivots[col] = r
    free = [c for c in range(2 * n) if c not in pivots]
    out = []
    for f in free:
        v = 1 << f
        for col, pr in pivots.items():
            if (pr >> f) & 1:
                v |= 1 << col
        out.append(v)
    return out


def min_distance(stabs, n):
    """Smallest weight of a Pauli in N(S) outside S."""
    norm = normalizer(stabs, n)
    sb = reduce_basis(stabs)
    logical = []
    span = list(sb)
    for v in norm:
        if not in_span(v, span):
            logical.append(v)
            span = reduce_basis(span + [v])
    group = np.zeros(1, dtype=np.uint64)
    for s in sb:
        group = np.concatenate([group, group ^ np.uint64(s)])
    mask = np.uint64((1 << n) - 1)
    best = n + 1
    for combo in range(1, 1 << len(logical)):
        l = 0
        for i, v in enumerate(logical):
            if (combo >> i) & 1:
                l ^= v
        elems = group ^ np.uint64(l)
        w = np.bitwise_count((elems & mask) | (elems >> np.uint64(n))).min()
        best = min(best, int(w))
    return best, len(logical) // 2


# ----------------------------------------------------- code search


def cyclic_codes(n, k):
    m = (n - k) // 2
    factors = factor_xn1(n)
    seen = set()
    for mask in range(1 << len(factors)):
        g = [1]
        for i, f in enumerate(factors):
            if (mask >> i) & 1:
                g = pmul(g, f)
        if len(g) - 1 != n - m or tuple(g) in seen:
            continue
        seen.add(tuple(g))
        # Every cyclic shift must be Hermitian-orthogonal to every other.
        pad = (g + [0] * n)[:n]
        full = [[pad[(i - s) % n] for i in range(n)] for s in range(n)]
        ok = all(
            xor_all(gmul(a, gconj(b)) for a, b in zip(u, v)) == 0
            for u in full
            for v in full
        )
        if not ok:
            continue
        stabs = []
        for r in full[:m]:
            stabs.append(pauli_from_gf4(r, n))
            stabs.append(pauli_from_gf4([gmul(2, e) for e in r], n))
        yield g, stabs


def xor_all(it):
    acc = 0
    for x in it:
        acc ^= x
    return acc


def golay_css():
    """CSS code from the [23,12,7] binary Golay code."""
    n = 23
    g = [1, 0, 1, 0, 1, 1, 1, 0, 0, 0, 1, 1]  # x^11+x^10+x^6+x^5+x^4+x^2+1
    # The dual is the even-weight subcode, generated by g(x)(x+1).
    h = [0] * (len(g) + 1)
    for i, c in enumerate(g):
        h[i] ^= c
        h[i + 1] ^= c
    rows = []
    for s in range(n - len(h) + 1):
        v = 0
        for i, c in enumerate(h):
            if c:
                v |= 1 << (i + s)
        rows.append(v)
    xs = rows
    zs = [r << n for r in rows]
    return h, xs + zs


def shor_code():
    """Shor's nine-qubit code: three repetition blocks in each basis."""
    n = 9
    stabs = []
    for b in range(3):
        for i in range(2):
            stabs.append((1 << (n + 3 * b + i)) | (1 << (n + 3 * b + i + 1)))
    for b in range(2):
        stabs.append(sum(1 << q for q in range(3 * b, 3 * b + 6)))
    return stabs


def shortened_hamming_dual():
    """Quantum code from the 14 points of PG(2,4) off a Fano subplane.

    The 3 x 14 GF(4) check matrix has pairwise independent columns, so its
    Hermitian dual has distance 3. Every line of PG(2,4) meets the Fano
    subplane in 1 or 3 points, hence the 14 kept points in 4 or 2, so every
    row-space word has even weight: the row space is Hermitian
    self-orthogonal.
    """
    points = []
    for v in itertools.product(range(4), repeat=3):
        first = next((c for c in v if c), 0)
        if first != 1:
            continue
        if all(c in (0, 1) for c in v):
            continue
        points.append(v)
    n = len(points)
    stabs = []
    for r in range(3):
        row = [pt[r] for pt in points]
        stabs.append(pauli_from_gf4(row, n))
        stabs.append(pauli_from_gf4([gmul(2, e) for e in row], n))
    return stabs


def cyc_mul(a, b, n):
    """Product of two binary polynomials (as ints) modulo x^n - 1."""
    out = 0
    for i in range(n):
        if (a >> i) & 1:
            out ^= ((b << i) | (b >> (n - i))) & ((1 << n) - 1)
    return out


def additive_cyclic(n, want):
    """Additive cyclic [[n,1]] codes for odd prime n with ord_n(2) = n - 1.

    Binary polynomials mod x^n - 1 split as GF(2) + GF(2^(n-1)); a rank n-1
    stabilizer invariant under cyclic shifts is {(u, u*lam) : u even weight}
    for some even-weight lam. Scans every lam, keeps the isotropic ones and
    returns the first reaching distance `want` (else the best seen).
    """
    full = (1 << n) - 1
    e = full ^ 1  # idempotent of the even-weight ideal
    best = None
    for half in range(1 << (n - 1)):
        lam = half << 1
        lam |= bin(lam).count("1") & 1  # force even weight
        gen = e | (cyc_mul(e, lam, n) << n)
        shifts = []
        for i in range(n):
            xs = ((gen & full) << i | (gen & full) >> (n - i)) & full
            zs = ((gen >> n) << i | (gen >> n) >> (n - i)) & full
            shifts.append(xs | (zs << n))
        if any(symp(gen, s, n) for s in shifts):
            continue
        if rank(shifts) != n - 1:
            continue
        dist, _ = min_distance(shifts, n)
        if best is None or dist > best[0]:
            best = (dist, lam, shifts)
            if dist >= want:
                break
    return best


# -------------------------------------------------------- encoders


def standard_form(stabs, n):
    """Row-reduce to Gottesman's standard form.

    Returns (rows, P, Q, K, relabeled): rows[0:r] have an X pivot on P[i],
    rows[r:] are Z-only with a Z pivot on Q[i]; K are the input qubits.
    """
    rows = reduce_basis(stabs)
    mask = (1 << n) - 1
    P = []
    upper = []
    rest = list(rows)
    for col in range(n):
        piv = next((i for i, r in enumerate(rest) if (r >> col) & 1), None)
        if piv is None:
            continue
        pr = rest.pop(piv)
        rest = [r ^ pr if (r >> col) & 1 else r for r in rest]
        upper = [u ^ pr if (u >> col) & 1 else u for u in upper]
        upper.append(pr)
        P.append(col)
    lower = rest  # X part zero
    Q = []
    low_done = []
    for col in range(n):
        if col in P:
            continue
        zc = n + col
        piv = next((i for i, r in enumerate(lower) if (r >> zc) & 1), None)
        if piv is None:
            continue
        pr = lower.pop(piv)
        lower = [r ^ pr if (r >> zc) & 1 else r for r in lower]
        low_done = [u ^ pr if (u >> zc) & 1 else u for u in low_done]
        upper = [u ^ pr if (u >> zc) & 1 else u for u in upper]
        low_done.append(pr)
        Q.append(col)
    assert not lower
    K = [c for c in range(n) if c not in P and c not in Q]
    relabeled = []
    for i, p in enumerate(P):
        if (upper[i] >> (n + p)) & 1:
            # Y at the pivot: rotate this qubit's frame (X<->Y) so the pivot
            # is a plain X. The rotated code has the same parameters.
            relabeled.append(p)
    return upper, low_done, P, Q, K, relabeled


def rotate_frames(stabs, qubits, n):
    out = []
    for s in stabs:
        for q in qubits:
            if (s >> q) & 1:
                s ^= 1 << (n + q)
        out.append(s)
    return out


def encoder(stabs, n):
    assert all(symp(a, b, n) == 0 for a in stabs for b in stabs), "stabilizers must commute"
    upper, lower, P, Q, K, relabeled = standard_form(stabs, n)
    if relabeled:
        stabs = rotate_frames(stabs, relabeled, n)
        upper, lower, P, Q, K, again = standard_form(stabs, n)
        assert not again
    gates = []
    # Controlled logical X from each input: X on Q columns where the
    # lower-block row has a Z on the input.
    for kj in K:
        for i, q in enumerate(Q):
            if (lower[i] >> (n + kj)) & 1:
                gates.append(("C-X", kj, q))
    for i, p in enumerate(P):
        gates.append(("H", p))
        row = upper[i]
        for t in range(n):
            if t == p:
                continue
            x, z = (row >> t) & 1, (row >> (n + t)) & 1
            if x and z:
                gates.append(("C-Y", p, t))
            elif x:
                gates.append(("C-X", p, t))
            elif z:
                gates.append(("C-Z", p, t))
    return gates, stabs, K, relabeled


def simulate(gates, n, inputs):
    """Stabilizers (phase-free) after running `gates` on |0...0>|psi>."""
    stabs = [1 << (n + q) for q in range(n) if q not in inputs]
    logicals = [(1 << q) for q in inputs] + [(1 << (n + q)) for q in inputs]

    def apply(v, g):
        def bit(v, i):
            return (v >> i) & 1

        def flip(v, i, c):
            return v ^ (c << i)

        if g[0] == "H":
            q = g[1]
            x, z = bit(v, q), bit(v, n + q)
            v = flip(v, q, x ^ z)
            v = flip(v, n + q, x ^ z)
            return v
        if g[0] in ("X", "Y", "Z"):
            return v
        c, t = g[1], g[2]
        if g[0] == "C-X":
            v = flip(v, t, bit(v, c))
            v = flip(v, n + c, bit(v, n + t))
            return v
        if g[0] == "C-Z":
            v = flip(v, n + t, bit(v, c))
            v = flip(v, n + c, bit(v, t))
            return v
        if g[0] == "C-Y":
            v = flip(v, n + t, bit(v, t))
            v = apply(v, ("C-X", c, t))
            v = flip(v, n + t, bit(v, t))
            return v
        raise ValueError(g)

    for g in gates:
        stabs = [apply(s, g) for s in stabs]
        logicals = [apply(l, g) for l in logicals]
    return stabs, logicals


def write_qasm(path, title, notes, n, inputs, gates):
    with open(path, "w") as f:
        f.write(f"# {title}\n")
        for line in notes:
            f.write(f"# {line}\n")
        for q in range(n):
            f.write(f"QUBIT q{q}\n" if q in inputs else f"QUBIT q{q},0\n")
        for g in gates:
            if g[0] == "H":
                f.write(f"H q{g[1]}\n")
            else:
                f.write(f"{g[0]} q{g[1]},q{g[2]}\n")


def poly_str(g):
    names = {1: "1", 2: "w", 3: "w^2"}
    terms = []
    for i, c in enumerate(g):
        if c:
            coef = "" if (c == 1 and i) else names[c]
            mono = "" if i == 0 else ("x" if i == 1 else f"x^{i}")
            terms.append(f"{coef}{mono}" if coef and mono else (coef or mono))
    return " + ".join(reversed(terms))


TARGETS = [(7, 1, 3), (9, 1, 3), (14, 8, 3), (19, 1, 7), (23, 1, 7)]


def derive(n, k, d):
    if (n, k, d) == (9, 1, 3):
        candidates = [(None, shor_code(), ["Shor code: ZZ checks inside each block of three, XXXXXX across blocks."])]
    elif (n, k, d) == (14, 8, 3):
        candidates = [(None, shortened_hamming_dual(), [
            "GF(4) code whose check matrix has as columns the 14 points of PG(2,4)",
            "off the Fano subplane of all-binary points; the check rows and their",
            "w multiples map to stabilizers under a*w + b*w^2 -> X^a Z^b.",
        ])]
    elif (n, k, d) == (19, 1, 7):
        found = additive_cyclic(19, 7)
        candidates = []
        if found:
            dist, lam, stabs = found
            lam_s = " + ".join(f"x^{i}" for i in range(19) if (lam >> i) & 1)
            candidates = [(None, stabs, [
                "Additive cyclic code: stabilizers are the cyclic shifts of X^e Z^(e*l)",
                "with e = x + ... + x^18 and",
                f"l = {lam_s}.",
            ])]
    elif (n, k, d) == (23, 1, 7):
        h, stabs = golay_css()
        origin = [
            "CSS code built from the cyclic [23,12,7] binary Golay code:",
            f"X and Z checks are the shifts of h(x) = (x+1) g(x) = {poly_str(h)}.",
        ]
        candidates = [(h, stabs, origin)]
    else:
        candidates = []
        for g, stabs in cyclic_codes(n, k):
            origin = [
                f"Cyclic GF(4)-linear code generated by g(x) = {poly_str(g)} (w^2 = w + 1),",
                "Hermitian self-orthogonal; stabilizers are the images of the first",
                f"{(n - k) // 2} shifts of g and w*g under a*w + b*w^2 -> X^a Z^b.",
            ]
            candidates.append((g, stabs, origin))
    best = None
    for g, stabs, origin in candidates:
        if rank(stabs) != n - k:
            continue
        dist, kk = min_distance(stabs, n)
        assert kk == k
        if best is None or dist > best[0]:
            best = (dist, stabs, origin)
        if dist >= d:
            break
    return best


def main(argv):
    if len(argv) == 3 and argv[1] == "--check":
        check_listing(argv[2])
        return
    out = argv[1] if len(argv) > 1 else "assets/qasm"
    for n, k, d in TARGETS:
        found = derive(n, k, d)
        if found is None:
            print(f"[[{n},{k},{d}]]: no cyclic code found")
            continue
        dist, stabs, origin = found
        gates, stabs, inputs, relabeled = encoder(stabs, n)
        got, _ = simulate(gates, n, inputs)
        assert rank(got + stabs) == rank(stabs) == n - k, "encoder does not prepare the code"
        dist2, _ = min_distance(stabs, n)
        assert dist2 == dist
        notes = list(origin)
        notes.append(f"Minimum distance {dist}, checked by enumerating every logical operator.")
        if relabeled:
            qs = ", ".join(f"q{q}" for q in relabeled)
            notes.append(
                f"Frames of {qs} are rotated (X <-> Y) so every pivot is a plain X;"
            )
            notes.append("the rotated code has the same parameters.")
        notes.append(
            "Standard-form encoder: C-X from the inputs, then H on each pivot and the"
        )
        notes.append(
            "pivot's controlled stabilizer. Verified on a stabilizer tableau."
        )
        ins = ", ".join(f"q{q}" for q in inputs)
        notes.append(f"Input qubit(s): {ins}; all others start in |0>.")
        notes.append("Stabilizer generators:")
        for s in reduce_basis(stabs):
            notes.append("  " + pauli_str(s, n))
        if dist < d:
            notes.insert(0, f"NOTE: best cyclic code found has distance {dist}, short of {d}.")
        name = {
            (7, 1, 3): "seven_one_three",
            (9, 1, 3): "nine_one_three",
            (14, 8, 3): "fourteen_eight_three",
            (19, 1, 7): "nineteen_one_seven",
            (23, 1, 7): "twentythree_one_seven",
        }[(n, k, d)]
        title = f"[[{n},{k},{dist}]] encoder."
        write_qasm(f"{out}/{name}.qasm", title, notes, n, inputs, gates)
        print(f"[[{n},{k},{dist}]] -> {name}.qasm, {len(gates)} gates")


def check_listing(path):
    names = []
    inputs = []
    gates = []
    for line in open(path):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        op, args = line.split(None, 1)
        parts = [a.strip() for a in args.split(",")]
        if op == "QUBIT":
            names.append(parts[0])
            if len(parts) == 1:
                inputs.append(len(names) - 1)
            continue
        ids = [names.index(p) for p in parts]
        gates.append((op.upper(), *ids))
    n = len(names)
    stabs, logicals = simulate(gates, n, inputs)
    dist, k = min_distance(stabs, n)
    print(f"n={n} k={k} d={dist}")
    for s in reduce_basis(stabs):
        print(" ", pauli_str(s, n))
    print("logicals:", [pauli_str(l, n) for l in logicals])


if __name__ == "__main__":
    main(sys.argv)
