"""The two local Hom-module computations, over Z/p^k.

Run: python3 walkthroughs/03_local_lemmas.py
"""

from ksverify import local_lemmas as local

# At a prime dividing d_B there are two modules, T and T'.  They differ in
# whether j maps e_1 M onto e_2 M.
t, t2, witness = local.classify_modules(5, 3)
print("classification witness:", witness)

# Hom(T', T) is {x' -> s x, y' -> p s y}, so on determinants the image is p det T.
res = local.verify_bad_prime(5, 3)
for key in ("hom_equals_expected", "image_equals_x_plus_varpi_y", "det_image_equals_varpi",
            "det_image_not_unit_ideal", "det_image_not_varpi_squared"):
    print(f"  {key}: {res[key]}")

# At a good prime the same construction has index 1.
print("good prime:", {k: v for k, v in local.verify_good_prime(13, 2).items() if k in ("index", "ok")})
