"""Trace metrics, anomaly detectors, log cleaning, and nonparametric tests.

Everything here is a pure function of its inputs. The exact rank tests count
integer tail masses over the full null distribution (see asyncvis._core), so
their p-values equal brute-force enumeration bit for bit.
"""

import math
import statistics
import warnings
from math import comb

from ._core import exact_impl as _exact
from .errors import ConfigurationError, DegenerateSampleError
from .trace import Trace
from .types import BLOCKING, NAIVE, HypothesisTestResult, MetricReport

DEFAULT_FLASHING_WINDOW = 0.5

# in-place (single-slot) policies: the only ones where temporal mismatch is
# the failure mode; multi-slot designs encode correspondence explicitly
_IN_PLACE = (BLOCKING, NAIVE)


# -- trace metrics -----------------------------------------------------------

def _in_flight_intervals(trace):
    """[start, end) in-flight span per responded/terminated request."""
    start = {}
    end = {}
    close_time = None
    for ev in trace:
        if ev.type == "request_issued":
            start[ev.req_id] = ev.t
        elif ev.type in ("response_arrived", "cancelled", "evicted"):
            if ev.req_id in start and ev.req_id not in end:
                end[ev.req_id] = ev.t
        elif ev.type in ("answer_submitted", "session_end") and close_time is None:
            close_time = ev.t
    intervals = []
    for req_id, s in start.items():
        e = end.get(req_id, close_time if close_time is not None else s)
        if e > s:
            intervals.append((s, e))
    return intervals


def concurrency_fraction(trace):
    """Share of task time with more than one request in flight."""
    completion = trace.completion_time()
    if completion is None or completion <= 0:
        return 0.0
    intervals = _in_flight_intervals(trace)
    if len(intervals) < 2:
        return 0.0
    points = []
    for s, e in intervals:
        points.append((s, 1))
        points.append((e, -1))
    points.sort()
    depth = 0
    overlap = 0.0
    prev = None
    for t, delta in points:
        if prev is not None and depth >= 2:
            overlap += t - prev
        depth += delta
        prev = t
    frac = overlap / completion
    return min(1.0, max(0.0, frac))


def detect_out_of_order(trace):
    """Issue/arrival inversions: pairs (i, j) issued i<j but arriving j first.

    Requests without a response are excluded; arrival order is the order of
    response_arrived events in the trace.
    """
    issue_order = []
    arrival_rank = {}
    for ev in trace:
        if ev.type == "request_issued":
            issue_order.append(ev.req_id)
        elif ev.type == "response_arrived" and ev.req_id not in arrival_rank:
            arrival_rank[ev.req_id] = len(arrival_rank)
    responded = [r for r in issue_order if r in arrival_rank]
    pairs = []
    for a in range(len(responded)):
        for b in range(a + 1, len(responded)):
            i, j = responded[a], responded[b]
            if arrival_rank[j] < arrival_rank[i]:
                pairs.append((i, j))
    return pairs


def detect_mismatch(trace):
    """Renders showing an older request than the latest one issued.

    Defined only for in-place (single-slot) policies; multi-slot traces
    return an empty list because their correspondence is encoded, not
    temporal.
    """
    cfg = trace.config or {}
    policy_kind = (cfg.get("policy") or {}).get("kind")
    if policy_kind is not None and policy_kind not in _IN_PLACE:
        return []
    issued = []  # (t, req_id), in order
    flagged = []
    idx = 0
    for ev in trace:
        if ev.type == "request_issued":
            issued.append((ev.t, ev.req_id))
        elif ev.type == "render_applied":
            newest = None
            for t, req_id in issued:
                if t <= ev.t:
                    newest = req_id
                else:
                    break
            if newest is not None and ev.req_id != newest:
                flagged.append(ev)
        idx += 1
    return flagged


def detect_flashing(trace, window=DEFAULT_FLASHING_WINDOW):
    """Ordered pairs of renders on the same slot closer than the window."""
    if window <= 0:
        raise ConfigurationError("flashing window must be > 0")
    renders = [(ev.slot, ev.t) for ev in trace if ev.type == "render_applied"]
    count = 0
    for a in range(len(renders)):
        slot_a, t_a = renders[a]
        for b in range(a + 1, len(renders)):
            slot_b, t_b = renders[b]
            if slot_a == slot_b and t_b - t_a < window:
                count += 1
    return count


def metric_report(trace, flashing_window=DEFAULT_FLASHING_WINDOW):
    """All per-session metrics in one pass-friendly bundle."""
    submitted = trace.first("answer_submitted")
    return MetricReport(
        completion_time=trace.completion_time() or 0.0,
        accuracy=submitted.correct if submitted is not None else None,
        concurrency_fraction=concurrency_fraction(trace),
        out_of_order_count=len(detect_out_of_order(trace)),
        mismatch_count=len(detect_mismatch(trace)),
        flashing_count=detect_flashing(trace, flashing_window),
    )


def clean_traces(traces):
    """Apply the log-cleaning rules; returns (kept, removal report).

    Rules, in order: (a) drop every trace of a participant whose answers are
    majority-wrong, (b) drop traces longer than two minutes, (c) drop traces
    with no interactions at all.
    """
    keyed = []
    for i, trace in enumerate(traces):
        key = trace.participant
        keyed.append((key if key is not None else f"__trace_{i}", trace))

    wrong = {}
    total = {}
    for key, trace in keyed:
        ev = trace.first("answer_submitted")
        if ev is None:
            continue
        total[key] = total.get(key, 0) + 1
        if ev.correct is False:
            wrong[key] = wrong.get(key, 0) + 1
    bad_ids = {k for k in total if wrong.get(k, 0) > total[k] / 2}

    report = {"majority_wrong": 0, "too_long": 0, "no_interaction": 0}
    kept = []
    for key, trace in keyed:
        if key in bad_ids:
            report["majority_wrong"] += 1
            continue
        completion = trace.completion_time()
        if completion is not None and completion > 120.0:
            report["too_long"] += 1
            continue
        if not trace.of_type("request_issued"):
            report["no_interaction"] += 1
            continue
        kept.append(trace)
    return kept, report


# -- rank machinery ----------------------------------------------------------

def _average_ranks(values):
    """Fractional ranks (1-based); ties share the mean of their positions."""
    order = sorted(range(len(values)), key=values.__getitem__)
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        rank = (i + j) / 2.0 + 1.0
        for k in range(i, j + 1):
            ranks[order[k]] = rank
        i = j + 1
    return ranks


def _doubled(ranks):
    return [int(round(2.0 * r)) for r in ranks]


def _normal_sf(z):
    return 0.5 * math.erfc(z / math.sqrt(2.0))


def _tie_sizes(values):
    sizes = []
    for v in sorted(set(values)):
        c = sum(1 for x in values if x == v)
        if c > 1:
            sizes.append(c)
    return sizes


def _exact_tail_p(counts, observed_doubled, total):
    le = sum(counts[: observed_doubled + 1])
    ge = sum(counts[observed_doubled:])
    smaller = min(le, ge)
    p_two = min(1.0, 2.0 * smaller / total)
    p_one = smaller / total
    return p_two, p_one


# -- hypothesis tests --------------------------------------------------------

def wilcoxon_signed_rank(pairs, mode="auto"):
    """Wilcoxon signed-rank test on paired samples.

    Zero differences are discarded; ties get average ranks. Exact p-values
    (n <= 25 under auto) equal full enumeration of the 2^n sign assignments;
    otherwise a normal approximation with tie and continuity corrections is
    used. Two-sided p is reported, with the smaller exact tail as the
    one-sided companion.
    """
    all_diffs = [float(a) - float(b) for a, b in pairs]
    diffs = [d for d in all_diffs if d != 0.0]
    if not diffs:
        raise DegenerateSampleError("all differences are zero")
    n = len(diffs)
    magnitudes = [abs(d) for d in diffs]
    ranks = _average_ranks(magnitudes)
    w_plus = sum(r for r, d in zip(ranks, diffs) if d > 0)
    estimate = pseudo_median(all_diffs)

    exact = mode == "exact" or (mode == "auto" and n <= 25)
    if mode not in ("exact", "approx", "auto"):
        raise ConfigurationError(f"unknown mode {mode!r}")
    if exact:
        counts = _exact.signed_rank_counts(_doubled(ranks))
        p_two, p_one = _exact_tail_p(counts, int(round(2.0 * w_plus)), 2 ** n)
        return HypothesisTestResult(
            method="wilcoxon_signed_rank", statistic=w_plus, p=p_two, n=n,
            exact=True, p_one_sided=p_one, estimate=estimate)

    mean = n * (n + 1) / 4.0
    var = n * (n + 1) * (2 * n + 1) / 24.0
    var -= sum(t ** 3 - t for t in _tie_sizes(magnitudes)) / 48.0
    if var <= 0:
        raise DegenerateSampleError("zero variance under ties")
    delta = w_plus - mean
    correction = 0.5 if delta > 0 else (-0.5 if delta < 0 else 0.0)
    z = (delta - correction) / math.sqrt(var)
    p_two = min(1.0, 2.0 * _normal_sf(abs(z)))
    return HypothesisTestResult(
        method="wilcoxon_signed_rank", statistic=w_plus, p=p_two, n=n, z=z,
        exact=False, p_one_sided=p_two / 2.0, estimate=estimate)


def wilcoxon_rank_sum(x, y, mode="auto"):
    """Mann-Whitney / Wilcoxon rank-sum test on independent samples.

    U is reported for the first sample. Exact p-values (n+m <= 20 under
    auto) equal enumeration over all C(n+m, n) group assignments; otherwise
    the tie-corrected normal approximation with continuity correction.
    """
    x = [float(v) for v in x]
    y = [float(v) for v in y]
    if not x or not y:
        raise DegenerateSampleError("both samples must be non-empty")
    n, m = len(x), len(y)
    pooled = x + y
    ranks = _average_ranks(pooled)
    r_x = sum(ranks[:n])
    u_x = r_x - n * (n + 1) / 2.0
    # Hodges-Lehmann shift estimate: median of all pairwise differences
    estimate = statistics.median(a - b for a in x for b in y)

    exact = mode == "exact" or (mode == "auto" and n + m <= 20)
    if mode not in ("exact", "approx", "auto"):
        raise ConfigurationError(f"unknown mode {mode!r}")
    if exact:
        counts = _exact.rank_sum_counts(_doubled(ranks), n)
        p_two, p_one = _exact_tail_p(counts, int(round(2.0 * r_x)), comb(n + m, n))
        return HypothesisTestResult(
            method="wilcoxon_rank_sum", statistic=u_x, p=p_two, n=n, m=m,
            exact=True, p_one_sided=p_one, estimate=estimate)

    big_n = n + m
    mean = n * m / 2.0
    tie_term = sum(t ** 3 - t for t in _tie_sizes(pooled))
    var = n * m / 12.0 * (big_n + 1 - tie_term / (big_n * (big_n - 1)))
    if var <= 0:
        raise DegenerateSampleError("zero variance under ties")
    delta = u_x - mean
    correction = 0.5 if delta > 0 else (-0.5 if delta < 0 else 0.0)
    z = (delta - correction) / math.sqrt(var)
    p_two = min(1.0, 2.0 * _normal_sf(abs(z)))
    return HypothesisTestResult(
        method="wilcoxon_rank_sum", statistic=u_x, p=p_two, n=n, m=m, z=z,
        exact=False, p_one_sided=p_two / 2.0, estimate=estimate)


def pseudo_median(x):
    """Hodges-Lehmann estimate: median of all Walsh averages (i <= j)."""
    x = [float(v) for v in x]
    if not x:
        raise DegenerateSampleError("empty sample")
    walsh = []
    for i in range(len(x)):
        for j in range(i, len(x)):
            walsh.append((x[i] + x[j]) / 2.0)
    return statistics.median(walsh)


def wilcoxon_one_sample(x, mu0, mode="auto"):
    """Signed-rank test of location mu0, with the pseudo-median estimate."""
    x = [float(v) for v in x]
    if all(v == mu0 for v in x):
        raise DegenerateSampleError("every value equals mu0")
    result = wilcoxon_signed_rank([(v, mu0) for v in x], mode=mode)
    return HypothesisTestResult(
        method="wilcoxon_one_sample", statistic=result.statistic, p=result.p,
        n=result.n, z=result.z, exact=result.exact,
        p_one_sided=result.p_one_sided, estimate=pseudo_median(x))


def holm_bonferroni(pvals, alpha=0.05):
    """Holm step-down correction; returns (reject flags, per-rank thresholds).

    Flags come back in input order; thresholds[i] is the level the i-th
    smallest p-value is compared against (alpha / (m - i)).
    """
    if not 0 < alpha < 1:
        raise ConfigurationError("alpha must be in (0, 1)")
    m = len(pvals)
    for p in pvals:
        if not 0 <= p <= 1:
            raise ConfigurationError(f"p-value {p} outside [0, 1]")
    thresholds = [alpha / (m - i) for i in range(m)]
    order = sorted(range(m), key=lambda i: pvals[i])
    flags = [False] * m
    for rank, idx in enumerate(order):
        if pvals[idx] <= thresholds[rank]:
            flags[idx] = True
        else:
            break
    return flags, thresholds


def pearson_r(x, y):
    """Sample correlation with its two-sided t-distribution p-value."""
    x = [float(v) for v in x]
    y = [float(v) for v in y]
    n = len(x)
    if n != len(y) or n < 3:
        raise DegenerateSampleError("need equal-length samples with n >= 3")
    mx = sum(x) / n
    my = sum(y) / n
    sxx = sum((v - mx) ** 2 for v in x)
    syy = sum((v - my) ** 2 for v in y)
    if sxx == 0 or syy == 0:
        raise DegenerateSampleError("zero variance")
    sxy = sum((a - mx) * (b - my) for a, b in zip(x, y))
    r = sxy / math.sqrt(sxx * syy)
    r = max(-1.0, min(1.0, r))
    if abs(r) == 1.0:
        return r, 0.0
    t = r * math.sqrt((n - 2) / (1.0 - r * r))
    from scipy.stats import t as t_dist  # deferred: keeps CLI startup light

    p = 2.0 * float(t_dist.sf(abs(t), n - 2))
    return r, min(1.0, p)


def median_ci(sample, level=0.95):
    """Distribution-free order-statistic CI for the median.

    Picks the largest k whose symmetric binomial(n, 1/2) tail mass outside
    [k, n-k+1) stays within 1 - level; below n = 6 no proper 95% interval
    exists, so (min, max) is returned with a coverage warning.
    """
    xs = sorted(float(v) for v in sample)
    n = len(xs)
    if n == 0:
        raise DegenerateSampleError("empty sample")
    med = statistics.median(xs)
    if n < 6:
        warnings.warn(
            f"n={n} is too small for a {level:.0%} median CI; returning the"
            " full range", stacklevel=2)
        return med, xs[0], xs[-1]
    total = 2 ** n
    best = None
    for k in range(1, n // 2 + 1):
        outside = 2 * sum(comb(n, i) for i in range(k)) / total
        if outside <= 1.0 - level:
            best = k
        else:
            break
    if best is None:
        warnings.warn(
            f"n={n} cannot reach {level:.0%} coverage; returning the full"
            " range", stacklevel=2)
        return med, xs[0], xs[-1]
    return med, xs[best - 1], xs[n - best]
