"""Machine tags, numeric resolution, and the weighted base score.

Run:  python3 demos/02_taxonomy_scoring.py
"""

from ioc_decay import base_score, load_bundled_taxonomies, parse_machine_tag, score_tags

registry = load_bundled_taxonomies()
print("bundled namespaces:", ", ".join(registry.namespaces()))

# A machine tag is a namespace:predicate pair, optionally with a quoted value.
tag = parse_machine_tag('misp:confidence-level="usually-confident"')
print(f"\nparsed {tag.serialize()!r} ->", (tag.namespace, tag.predicate, tag.value))
print("numeric value:", registry.resolve_tag(tag))

# Matching is forgiving about case and spaces, so prose labels resolve too.
for text in (
    'misp:confidence-level="Completely confident"',
    'osint:certainty="Probably not"',
    'admiralty-scale:information-credibility="2"',
    'misp:confidence-level="Confidence cannot be evaluated"',   # -> unresolved
    'tlp:green',                                                # unknown namespace
):
    resolved = registry.resolve_tag(parse_machine_tag(text))
    print(f"  {text:<58} -> {resolved if resolved is not None else 'unresolved'}")

# The tag score is a weight-normalized mean over everything that resolved;
# unresolved tags simply drop out instead of poisoning the result.
tags = [
    parse_machine_tag('misp:confidence-level="usually-confident"'),      # 75, weight 50
    parse_machine_tag('osint:certainty="almost-certain"'),               # 93, weight 50
    parse_machine_tag('misp:confidence-level="Confidence cannot be evaluated"'),
]
tag_value = score_tags(registry, tags)
print(f"\ntag score over {len(tags)} tags (one unresolvable): {tag_value:.4f}")

# The base score blends the tag score with how much we trust the source.
# The two weights must sum to 100; moving weight shifts the emphasis.
for weight_tg in (100, 50, 0):
    value = base_score(tag_value, 0.9, weight_tg, 100 - weight_tg)
    print(f"  weight_tg={weight_tg:>3}  omega_sc={100 - weight_tg:>3}  base_score={value:6.2f}")
