"""persalg: exact computations in filtered and persistence homological algebra.

Subpackages
-----------
novikov           exact Z2 Novikov arithmetic with rational exponents
persistence       barcodes and interleaving-type distances
filtered_complex  filtered Z2 chain complexes, cones, cone-length
novikov_complex   Floer-type complexes over the Novikov field
ainf              tabulated filtered A-infinity categories
hochschild        reduced cyclic bar complexes with filtrations
fukaya_models     exact sphere and torus model tabulations
entropy           cone-length growth, entropy estimators, action models
morse             small-variation / large-gradient Morse profiles
cli               command-line interface
"""

__version__ = "0.1.0"
