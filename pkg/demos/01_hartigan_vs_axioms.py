"""
Hartigan tree versus the finest axiom tree
==========================================

Three regions with levels 3, 2 and 1.  The two densest ones touch at a
single corner, so their union is connected but its interior is not.
"""

from clustertree import axiom_tree, classify, hartigan_tree, verify_cluster
from clustertree.fixtures import fig_hartigan

cx = fig_hartigan()
print(cx)
print(classify(cx))

# The touch-graph sweep joins A1 and A2 at level 2 ...
for cluster, h in hartigan_tree(cx).cluster_heights().items():
    print("H  ", sorted(cluster), "height", h)

# ... the neighbor-graph sweep keeps them apart until A3 arrives.
for cluster, h in axiom_tree(cx).cluster_heights().items():
    print("C* ", sorted(cluster), "height", h)

# Why {A1, A2} is rejected: A1 fails, with a witness pair.
print(verify_cluster({1, 2}, cx).to_dict())
