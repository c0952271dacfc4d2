"""
Self-intersections, Gauss-map injectivity and ideal boundary points
====================================================================

Run with ``python3 demos/embeddedness.py``.
"""

from horogauss import catalog
from horogauss.embed_probe import probe

# Each probe meshes the surface in the Poincare ball, finds crossing and
# coincident triangle pairs, samples G for repeated values and follows the
# unbounded parameter directions out to the boundary sphere.
for selector in ("sphere:r=1", "horosphere", "equidistant:d=0.5", "equidistant:d=0.5,wraps=2", "limacon"):
    rep, mesh = probe(catalog.resolve(selector).chart, resolution=32)
    ends = [tuple(round(x, 3) for x in d) for d, _ in rep.boundary_clusters]
    print(f"{selector:26s} crossings={len(rep.intersecting_pairs):4d}  "
          f"coincident={len(rep.coincident_pairs):5d}  G repeats={len(rep.injectivity_violations):3d}  "
          f"ideal points={ends}")

# The limacon mesh, for a look in any OFF viewer.
_, mesh = probe(catalog.limacon_cylinder().chart, resolution=48)
mesh.write_off("limacon.off")
print("\nwrote limacon.off with", len(mesh.vertices), "vertices and", len(mesh.triangles), "faces")
