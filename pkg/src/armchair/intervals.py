"""Closed-interval set arithmetic on sorted lists of ``(lo, hi)`` pairs."""

from __future__ import annotations

import math


def normalize(ivs, tol=0.0):
    """Sort, drop intervals shorter than ``tol`` and merge overlaps."""
    out = []
    for lo, hi in sorted((float(a), float(b)) for a, b in ivs):
        if hi - lo < tol or hi < lo:
            continue
        if out and lo <= out[-1][1]:
            out[-1] = (out[-1][0], max(out[-1][1], hi))
        else:
            out.append((lo, hi))
    return out


def union(*sets, tol=0.0):
    return normalize([iv for s in sets for iv in s], tol)


def intersect(A, B, tol=0.0):
    out = []
    i = j = 0
    A, B = normalize(A), normalize(B)
    while i < len(A) and j < len(B):
        lo = max(A[i][0], B[j][0])
        hi = min(A[i][1], B[j][1])
        if hi - lo >= tol and hi >= lo:
            out.append((lo, hi))
        if A[i][1] < B[j][1]:
            i += 1
        else:
            j += 1
    return normalize(out, tol)


def subtract(A, B, tol=0.0):
    """``A`` minus the interiors of ``B``; pieces shorter than ``tol`` are dropped."""
    out = []
    B = normalize(B)
    for lo, hi in normalize(A):
        cur = lo
        for blo, bhi in B:
            if bhi <= cur or blo >= hi:
                continue
            if blo > cur:
                out.append((cur, blo))
            cur = max(cur, bhi)
        if cur < hi:
            out.append((cur, hi))
    return normalize(out, tol)


def contains(ivs, x, tol=0.0):
    return any(lo - tol <= x <= hi + tol for lo, hi in ivs)


def measure(ivs):
    return math.fsum(hi - lo for lo, hi in ivs)
