"""
Distance zero, different trees
==============================

The merge distortion distance only looks at merge heights.  Adding a
cluster whose height equals its parent's leaves every merge height as it
was, so the distance is zero although the trees differ.
"""

from clustertree import is_isomorphic, merge_distortion, merge_height_table
from clustertree.fixtures import example1_trees, example2_trees

c, c_prime = example1_trees()
print(c.cluster_heights())
print(c_prime.cluster_heights())

# identical merge height tables
print(merge_height_table(c).as_array())
print(merge_height_table(c_prime).as_array())

result = merge_distortion(c, c_prime)
print("d_M =", result.value, "isomorphic:", is_isomorphic(c, c_prime))

# Constant density: any nesting at all is invisible to d_M.
cx, flat, nested = example2_trees()
print("d_M =", merge_distortion(flat, nested).value, "isomorphic:", is_isomorphic(flat, nested))
