"""Exact balanced assignment by successive shortest paths.

The problem is a transportation problem: ``n`` unit supplies (points) are
shipped to ``k`` sinks (clusters) that each accept exactly ``capacity`` units,
minimising the total cost ``sum_i cost[i, label[i]]``. It is a min-cost flow
on a bipartite graph, so an integral optimum exists and successive shortest
paths finds it.

Because ``k`` is small, the residual graph is contracted onto the sink nodes:
moving one point ``j`` from sink ``h`` to sink ``g`` costs
``cost[j, g] - cost[j, h]`` and the cheapest such move for every ordered pair
``(h, g)`` is kept in a lazily-cleaned heap. Each augmentation is then a
Dijkstra run on ``k`` nodes followed by at most ``k - 1`` point moves.

Costs are quantised to integers so that reduced costs and potentials are
exact; the quantum is ``max|cost| / 2**50``.
"""

import heapq

import numpy as np

QUANT_BITS = 50


def quantize_costs(cost):
    """Integer version of ``cost`` and the size of one integer unit."""
    cost = np.asarray(cost, dtype=np.float64)
    top = float(np.abs(cost).max()) if cost.size else 0.0
    if top == 0.0:
        return np.zeros(cost.shape, dtype=np.int64), 1.0
    quantum = top / float(2**QUANT_BITS)
    return np.rint(cost / quantum).astype(np.int64), quantum


class _MoveHeaps:
    """Cheapest point move between every ordered pair of sinks."""

    def __init__(self, cost_rows, labels, k):
        self.cost = cost_rows
        self.labels = labels
        self.k = k
        self.heaps = [None] * k

    def _build(self, h):
        members = [j for j, lab in enumerate(self.labels) if lab == h]
        rows = self.cost
        heaps = []
        for g in range(self.k):
            if g == h:
                heaps.append(None)
                continue
            hp = [(rows[j][g] - rows[j][h], j) for j in members]
            heapq.heapify(hp)
            heaps.append(hp)
        self.heaps[h] = heaps

    def cheapest(self, h, g):
        """(delta, point) for the cheapest move h -> g, or None."""
        if self.heaps[h] is None:
            self._build(h)
        hp = self.heaps[h][g]
        labels = self.labels
        while hp and labels[hp[0][1]] != h:
            heapq.heappop(hp)
        return hp[0] if hp else None

    def moved_in(self, j, h):
        heaps = self.heaps[h]
        if heaps is None:
            return
        row = self.cost[j]
        for g in range(self.k):
            if g != h:
                heapq.heappush(heaps[g], (row[g] - row[h], j))


def balanced_assignment(cost, capacity, prices=None):
    """Optimal integral assignment of points to equally sized sinks.

    Parameters
    ----------
    cost : (n, k) array
        ``cost[i, h]`` is the price of putting point ``i`` into sink ``h``.
    capacity : int
        Points per sink; ``n`` must equal ``k * capacity``.
    prices : (k,) array, optional
        Sink potentials from an earlier call on a similar instance. Any value
        is valid; good prices only shorten the search.

    Returns
    -------
    labels : (n,) int array
    prices : (k,) float array
        Potentials certifying optimality: every point sits in a sink that
        minimises ``cost[i, h] - prices[h]``.
    """
    cost = np.asarray(cost, dtype=np.float64)
    if cost.ndim != 2:
        raise ValueError(f"cost must be 2-D, got shape {cost.shape}")
    n, k = cost.shape
    if capacity < 1 or n != k * capacity:
        raise ValueError(f"n={n} points cannot fill k={k} sinks of size {capacity}")

    icost, quantum = quantize_costs(cost)
    if prices is None:
        pot = np.zeros(k, dtype=np.int64)
    else:
        pot = np.rint(np.asarray(prices, dtype=np.float64) / quantum).astype(np.int64)

    labels = np.argmin(icost - pot, axis=1)
    excess = np.bincount(labels, minlength=k) - capacity
    if not excess.any():
        return labels, pot.astype(np.float64) * quantum

    rows = icost.tolist()
    lab = labels.tolist()
    pot = pot.tolist()
    excess = excess.tolist()
    moves = _MoveHeaps(rows, lab, k)
    inf = float("inf")

    remaining = sum(e for e in excess if e > 0)
    while remaining:
        dist = [0 if e > 0 else inf for e in excess]
        prev = [-1] * k
        via = [-1] * k
        done = [False] * k
        target = -1
        while True:
            u = -1
            best = inf
            for h in range(k):
                if not done[h] and dist[h] < best:
                    best = dist[h]
                    u = h
            if u < 0:
                break
            done[u] = True
            if excess[u] < 0:
                target = u
                break
            pu = pot[u]
            for g in range(k):
                if done[g]:
                    continue
                top = moves.cheapest(u, g)
                if top is None:
                    continue
                nd = best + top[0] + pu - pot[g]
                if nd < dist[g]:
                    dist[g] = nd
                    prev[g] = u
                    via[g] = top[1]
        if target < 0:
            raise RuntimeError("no augmenting path; instance is infeasible")

        reach = dist[target]
        for h in range(k):
            pot[h] += dist[h] if dist[h] < reach else reach

        g = target
        while prev[g] >= 0:
            j = via[g]
            lab[j] = g
            moves.moved_in(j, g)
            g = prev[g]
        excess[g] -= 1
        excess[target] += 1
        remaining -= 1

    return np.asarray(lab, dtype=np.intp), np.asarray(pot, dtype=np.float64) * quantum
