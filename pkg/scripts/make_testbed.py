"""Regenerate src/ndnsub/ndnsim/data/testbed.topo.

Sites carry NDN-testbed-style names and approximate coordinates.  Links are
synthetic: a minimum spanning tree over great-circle distance, then each
router's nearest neighbours, then the globally shortest remaining pairs
until 98 router links exist; one more link attaches the producer host.
Latency is distance over 200 km/ms (fibre), cost is latency in ms (>= 1).
"""
import heapq
import math
import sys

SITES = [
    ("UCLA", 34.07, -118.44), ("UCI", 33.64, -117.84), ("ARIZONA", 32.23, -110.95),
    ("UTAH", 40.76, -111.84), ("CSU", 40.57, -105.08), ("WASHU", 38.65, -90.31),
    ("MEMPHIS", 35.12, -89.94), ("UIUC", 40.11, -88.23), ("MICH", 42.28, -83.74),
    ("TNTECH", 36.17, -85.51), ("NIST", 39.13, -77.22), ("VERISIGN", 38.95, -77.45),
    ("NEU", 42.34, -71.09), ("FIU", 25.76, -80.37),
    ("QUB", 54.58, -5.93), ("MINHO", 41.56, -8.40), ("AVEIRO", 40.63, -8.66),
    ("URJC", 40.33, -3.87), ("LIP6", 48.85, 2.36), ("SYSTEMX", 48.71, 2.17),
    ("DELFT", 52.00, 4.37), ("BERN", 46.95, 7.44), ("BASEL", 47.56, 7.58),
    ("GOETTINGEN", 51.54, 9.93), ("MUNICH", 48.15, 11.57), ("PADUA", 45.41, 11.88),
    ("WU", 48.21, 16.37), ("NTNU", 63.42, 10.40),
    ("KISTI", 36.37, 127.36), ("ANYANG", 37.39, 126.95), ("WASEDA", 35.71, 139.72),
    ("OSAKA", 34.82, 135.52), ("TONGJI", 31.28, 121.50), ("BUPT", 39.96, 116.36),
    ("SINGAPORE", 1.30, 103.77), ("SRRU", 14.89, 103.49),
]
EDGES = {"UCLA", "ARIZONA", "CSU", "UIUC", "NEU", "FIU", "QUB", "URJC", "LIP6",
         "GOETTINGEN", "WU", "KISTI", "WASEDA", "BUPT", "SINGAPORE"}
PRODUCER_SITE = "MEMPHIS"
ROUTER_LINKS = 98
NEAREST = 3


def km(a, b):
    la1, lo1, la2, lo2 = map(math.radians, (a[1], a[2], b[1], b[2]))
    h = (math.sin((la2 - la1) / 2) ** 2
         + math.cos(la1) * math.cos(la2) * math.sin((lo2 - lo1) / 2) ** 2)
    return 2 * 6371 * math.asin(math.sqrt(h))


def main(out):
    n = len(SITES)
    dist = {(i, j): km(SITES[i], SITES[j]) for i in range(n) for j in range(i + 1, n)}
    links = set()
    # Prim's MST
    seen = {0}
    heap = [(dist[(0, j)], 0, j) for j in range(1, n)]
    heapq.heapify(heap)
    while len(seen) < n:
        d, i, j = heapq.heappop(heap)
        if j in seen:
            continue
        seen.add(j)
        links.add((min(i, j), max(i, j)))
        for k in range(n):
            if k not in seen:
                heapq.heappush(heap, (dist[(min(j, k), max(j, k))], j, k))
    for i in range(n):
        near = sorted((dist[(min(i, j), max(i, j))], j) for j in range(n) if j != i)
        for _, j in near[:NEAREST]:
            links.add((min(i, j), max(i, j)))
    for d, pair in sorted((d, pr) for pr, d in dist.items()):
        if len(links) >= ROUTER_LINKS:
            break
        links.add(pair)
    if len(links) != ROUTER_LINKS:
        sys.exit(f"generated {len(links)} router links, wanted {ROUTER_LINKS}")

    lines = [
        "# Synthetic stand-in for the NDN testbed: 36 routers named after testbed",
        "# sites plus one producer host = 37 nodes; 98 router links + 1 producer",
        "# access link = 99 links.  Coordinates are approximate and the link set is",
        "# generated (see scripts/make_testbed.py); it is NOT a snapshot of the",
        "# real testbed.  Latency: great-circle km / 200 km/ms.  Cost: latency ms.",
        "",
    ]
    for name, _, _ in SITES:
        lines.append(f"node {name} {'edge' if name in EDGES else 'intermediate'}")
    lines.append("node PRODUCER producer prefix=/com/test")
    lines.append("")
    for i, j in sorted(links):
        d = dist[(i, j)]
        lat_us = max(100, round(d / 200 * 1000))
        cost = max(1, round(lat_us / 1000))
        lines.append(f"link {SITES[i][0]} {SITES[j][0]} cost={cost} lat_us={lat_us} bw_bps=100000000")
    lines.append(f"link PRODUCER {PRODUCER_SITE} cost=1 lat_us=500 bw_bps=1000000000")
    with open(out, "w") as fh:
        fh.write("\n".join(lines) + "\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "src/ndnsub/ndnsim/data/testbed.topo")
