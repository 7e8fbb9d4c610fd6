"""Exact null distributions for the rank tests, by integer counting.

Ranks are passed doubled (average ranks under ties are half-integers, so
doubling makes every rank an exact integer) and the returned arrays hold
exact integer counts, so tail probabilities computed from them are identical
to full enumeration of all sign assignments / subsets.

This file is also compiled as ``asyncvis._core._exact_c`` (see the .pyx shim).
"""


def signed_rank_counts(doubled_ranks):
    """Distribution of the doubled positive-rank sum over all 2^n sign flips.

    Returns counts where counts[s] is the number of sign assignments whose
    positive ranks sum (doubled) to s; sum(counts) == 2**n.
    """
    total = 0
    for r in doubled_ranks:
        if r <= 0:
            raise ValueError("doubled ranks must be positive integers")
        total += r
    counts = [0] * (total + 1)
    counts[0] = 1
    for r in doubled_ranks:
        for s in range(total, r - 1, -1):
            below = counts[s - r]
            if below:
                counts[s] += below
    return counts


def rank_sum_counts(doubled_ranks, n):
    """Distribution of the doubled rank sum of an n-subset of the pool.

    Returns counts where counts[s] is the number of size-n subsets of the
    pooled doubled ranks summing to s; sum(counts) == C(len(pool), n).
    """
    pool = list(doubled_ranks)
    if not 0 < n <= len(pool):
        raise ValueError("subset size out of range")
    total = sum(pool)
    # dp[k][s]: number of k-subsets of the ranks seen so far with sum s
    dp = [[0] * (total + 1) for _ in range(n + 1)]
    dp[0][0] = 1
    seen = 0
    for r in pool:
        seen += 1
        top = n if seen > n else seen
        for k in range(top, 0, -1):
            row = dp[k]
            prev = dp[k - 1]
            for s in range(total, r - 1, -1):
                below = prev[s - r]
                if below:
                    row[s] += below
    return dp[n]
