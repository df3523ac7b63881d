"""Computational checks for twelve-point kissing configurations.

Modules: ``hypermap`` (combinatorial maps), ``sphgeom`` (trigonometry on
the radius-2 sphere), ``fan`` (contact fans and their hypermaps), ``tame``
(bound tables and the tame-contact predicate), ``enumerator`` (classification
search), ``estimate`` (triangle area cases) and ``lpfeas`` (exact LP and
candidate elimination).
"""

__version__ = "0.1.0"
