"""
Exact D-module algebra: localized rings, Weyl operators, connections, inverse
images, truncated complexes, transfer modules and the Gauss-Manin connection.
"""
