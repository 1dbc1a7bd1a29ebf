#!/usr/bin/env python3
"""Regenerate the bundled GraphML fixtures under data/topologies/.

Zoo-derived topologies are converted from the JSON copies shipped inside the
`topohub` wheel (node coordinates plus per-link lengths in km). Sinet and Tinet
are not available there at the sizes used by the experiments, so deterministic
synthetic stand-ins with the same node/link counts are generated instead.

usage: make_fixtures.py <topohub.whl> <out-dir>
"""
import json
import math
import random
import sys
import zipfile
from xml.sax.saxutils import escape

ZOO = ["Nsfnet", "Ans", "Aarnet", "Agis", "Digex", "Chinanet", "Bellcanada"]

# name -> (nodes, links, seed, [(count, lat_lo, lat_hi, lon_lo, lon_hi), ...])
SYNTHETIC = {
    "Sinet": (13, 18, 2011, [(13, 31.0, 43.5, 130.0, 142.0)]),
    "Tinet": (53, 89, 2010, [(40, 36.0, 60.0, -10.0, 30.0),
                             (13, 30.0, 47.0, -122.0, -74.0)]),
}


def haversine(a, b):
    lat1, lon1, lat2, lon2 = map(math.radians, (a[0], a[1], b[0], b[1]))
    h = (math.sin((lat2 - lat1) / 2) ** 2
         + math.cos(lat1) * math.cos(lat2) * math.sin((lon2 - lon1) / 2) ** 2)
    return 2 * 6371.0 * math.asin(math.sqrt(min(1.0, h)))


def write_graphml(path, name, nodes, edges, synthetic):
    out = ['<?xml version="1.0" encoding="utf-8"?>',
           '<graphml xmlns="http://graphml.graphdrawing.org/xmlns">',
           '  <key attr.name="Network" attr.type="string" for="graph" id="d0" />',
           '  <key attr.name="Synthetic" attr.type="int" for="graph" id="d1" />',
           '  <key attr.name="Latitude" attr.type="double" for="node" id="d29" />',
           '  <key attr.name="Longitude" attr.type="double" for="node" id="d32" />',
           '  <key attr.name="label" attr.type="string" for="node" id="d33" />',
           '  <key attr.name="length" attr.type="double" for="edge" id="d40" />',
           '  <graph edgedefault="undirected">',
           f'    <data key="d0">{escape(name)}</data>',
           f'    <data key="d1">{1 if synthetic else 0}</data>']
    for nid, label, lat, lon in nodes:
        out.append(f'    <node id="{nid}">')
        out.append(f'      <data key="d29">{lat:.5f}</data>')
        out.append(f'      <data key="d32">{lon:.5f}</data>')
        out.append(f'      <data key="d33">{escape(label)}</data>')
        out.append('    </node>')
    for u, v, length in edges:
        if length is None:
            out.append(f'    <edge source="{u}" target="{v}" />')
        else:
            out.append(f'    <edge source="{u}" target="{v}">')
            out.append(f'      <data key="d40">{length:.2f}</data>')
            out.append('    </edge>')
    out += ['  </graph>', '</graphml>', '']
    with open(path, "w", encoding="utf-8") as f:
        f.write("\n".join(out))


def from_topohub(wheel, name):
    doc = json.loads(wheel.read(f"topohub/data/topozoo/{name}.json"))
    nodes = [(n["id"], n.get("name") or f"n{n['id']}", n["pos"][1], n["pos"][0])
             for n in doc["nodes"]]
    edges = [(e["source"], e["target"], float(e["dist"])) for e in doc["edges"]]
    return nodes, edges


def synthetic(name, n_nodes, n_links, seed, regions):
    rng = random.Random(seed)
    coords = []
    for count, la0, la1, lo0, lo1 in regions:
        coords += [(rng.uniform(la0, la1), rng.uniform(lo0, lo1)) for _ in range(count)]
    assert len(coords) == n_nodes
    dist = {(i, j): haversine(coords[i], coords[j])
            for i in range(n_nodes) for j in range(i + 1, n_nodes)}
    # Prim spanning tree, then the shortest missing links until the count matches.
    in_tree, edges = {0}, set()
    while len(in_tree) < n_nodes:
        i, j = min(((a, b) for a in in_tree for b in range(n_nodes) if b not in in_tree),
                   key=lambda p: dist[tuple(sorted(p))])
        edges.add(tuple(sorted((i, j))))
        in_tree.add(j)
    for pair in sorted(dist, key=dist.get):
        if len(edges) == n_links:
            break
        edges.add(pair)
    nodes = [(str(i), f"{name}-{i:02d}", la, lo) for i, (la, lo) in enumerate(coords)]
    return nodes, [(str(u), str(v), None) for u, v in sorted(edges)]


def main():
    wheel = zipfile.ZipFile(sys.argv[1])
    out_dir = sys.argv[2]
    for name in ZOO:
        nodes, edges = from_topohub(wheel, name)
        write_graphml(f"{out_dir}/{name.lower()}.graphml", name, nodes, edges, False)
        print(name, len(nodes), len(edges))
    for name, (n, m, seed, regions) in SYNTHETIC.items():
        nodes, edges = synthetic(name, n, m, seed, regions)
        write_graphml(f"{out_dir}/{name.lower()}.graphml", name, nodes, edges, True)
        print(name, len(nodes), len(edges), "(synthetic)")


if __name__ == "__main__":
    main()
