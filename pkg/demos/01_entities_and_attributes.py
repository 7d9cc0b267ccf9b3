"""Entity ingestion and attribute annotation.

Every foreground asset becomes an Entity: color raster + alpha matte +
category + attributes. Color is named automatically (histogram mode over
opaque pixels, snapped to the nearest CSS3 keyword); transparency and
saliency come from the embedded category lists; humans additionally carry
gender, age group, and clothes, and pick up gender/age-specific synonyms.
"""

import numpy as np

from matteforge import age_to_group, annotate_color, default_tables
from _assets import demo_entity, soft_disk_asset

# --- color naming -----------------------------------------------------------

rgb, alpha = soft_disk_asset("lightpink")
print("a lightpink disk annotates as:", annotate_color(rgb, alpha))

noisy = rgb.astype(np.int16) + np.random.default_rng(0).integers(
    -6, 7, size=rgb.shape)
noisy = np.clip(noisy, 0, 255).astype(np.uint8)
print("with pixel noise it still annotates as:", annotate_color(noisy, alpha))

# --- category flags ----------------------------------------------------------

tables = default_tables()
for category in ("wine glass", "fire", "net", "cat"):
    transparent, salient = tables.with_category(category).annotate_flags(category)
    print(f"{category!r}: transparent={transparent} salient={salient}")

# --- age groups and synonyms --------------------------------------------------

for age in (3, 13, 18, 30, 55, 72):
    print(f"age {age} -> {age_to_group(age)}")
print("female adult may be called:",
      sorted(tables.human_synonyms_for("female", "adult")))

# --- a full entity -------------------------------------------------------------

person = demo_entity("p0", "human", "human", "peru",
                     gender="female", age=30, clothes="red dress")
print("\nhuman attribute words:", person.attributes.words())
print("human synonyms:", sorted(person.synonyms))

flower = demo_entity("f0", "flower", "object", "lightpink")
print("object attribute words:", flower.attributes.words())
print("object synonyms:", sorted(flower.synonyms))
