#!/usr/bin/env python3
"""Writes the bundled kenya-style scenario.

The probabilities are illustrative: they are shaped after published
demographic patterns for rural Kenya (young age pyramid, polygamy, high
fertility) but are not taken from any survey table. Reduced copies of the
agent network inside matching networks use exact marginals computed here.

Run from this directory:  python3 make_scenario.py
"""

import itertools
import json
import math

SLICES = [f"{5 * i}-{5 * i + 4}" for i in range(17)]
AGES = [str(a) for a in range(85)]
LOCATIONS = [f"loc{i}" for i in range(1, 9)]
LOCATION_PRIOR = [0.20, 0.16, 0.14, 0.12, 0.11, 0.10, 0.09, 0.08]
WORK = ["none", "farming", "trade", "teaching"]
YESNO = ["yes", "no"]


def normalize(row):
    s = sum(row)
    return [x / s for x in row]


def age_prior():
    # Young pyramid: roughly 3% fewer people per extra year of age.
    return normalize([math.exp(-a / 28.0) * (1.0 if a < 60 else math.exp(-(a - 60) / 12.0))
                      for a in range(85)])


def slice_marginal():
    prior = age_prior()
    return [sum(prior[5 * s:5 * s + 5]) for s in range(17)]


def married_row(gender, s):
    age = 5 * s
    if gender == "female":
        table = {3: 0.45, 4: 0.66, 5: 0.78, 6: 0.82}
        p = 0.0 if age < 15 else table.get(s, 0.80 if age < 50 else (0.70 if age < 65 else 0.50))
    else:
        table = {4: 0.08, 5: 0.40, 6: 0.66}
        p = 0.0 if age < 20 else table.get(s, 0.84 if age < 60 else 0.78)
    return [p, 1.0 - p]


def work_row(gender, s):
    age = 5 * s
    if age < 10:
        return [1.0, 0.0, 0.0, 0.0]
    if age < 15:
        working = 0.15
    elif age < 65:
        working = 0.72 if gender == "male" else 0.62
    else:
        working = 0.30
    split = [0.60, 0.30, 0.10] if age >= 20 else [0.80, 0.20, 0.0]
    return [1.0 - working] + [working * x for x in split]


def truncated_poisson(mean, top):
    if mean <= 0:
        return [1.0] + [0.0] * top
    row = [math.exp(-mean) * mean ** k / math.factorial(k) for k in range(top + 1)]
    row[top] += 1.0 - sum(row)
    return normalize(row)


def spouses_row(gender, married):
    if married == "no":
        return [1.0, 0.0, 0.0, 0.0]
    if gender == "female":
        return [0.0, 1.0, 0.0, 0.0]
    return [0.0, 0.84, 0.14, 0.02]


CHILDREN_MEAN = {3: 0.7, 4: 1.6, 5: 2.5, 6: 3.2, 7: 3.7, 8: 4.0, 9: 4.1, 10: 3.9,
                 11: 3.6, 12: 3.2, 13: 2.8, 14: 2.4, 15: 2.0, 16: 1.6}


def mother_row(gender, s, married):
    if gender == "male" or s < 3:
        return truncated_poisson(0, 8)
    mean = CHILDREN_MEAN[s] * (1.0 if married == "yes" else 0.35)
    return truncated_poisson(mean, 8)


def colleagues_row(work):
    if work == "none":
        return [1.0] + [0.0] * 6
    return [0.0, 0.25, 0.30, 0.22, 0.13, 0.07, 0.03]


def friends_row(s):
    if s == 0:
        return [1.0] + [0.0] * 6
    return [0.02, 0.18, 0.30, 0.25, 0.15, 0.07, 0.03]


def variable(name, domain, parents, rows):
    for r in rows:
        assert len(r) == len(domain), name
        assert abs(sum(r) - 1.0) < 1e-9, (name, sum(r))
    return {"name": name, "domain": domain, "parents": parents,
            "cpt": [[round(x, 12) for x in normalize(r)] for r in rows]}


def rows_over(parent_domains, fn):
    return [fn(*combo) for combo in itertools.product(*parent_domains)]


def agent_bn():
    genders = ["male", "female"]
    slices = list(range(17))
    return [
        variable("gender", genders, [], [[0.5, 0.5]]),
        variable("ageDetail", AGES, [], [age_prior()]),
        variable("ageSlices", SLICES, ["ageDetail"],
                 [[1.0 if s == a // 5 else 0.0 for s in range(17)] for a in range(85)]),
        variable("married", YESNO, ["gender", "ageSlices"],
                 rows_over([genders, slices], married_row)),
        variable("work", WORK, ["gender", "ageSlices"], rows_over([genders, slices], work_row)),
        variable("location", LOCATIONS, [], [LOCATION_PRIOR]),
        variable("RC_spouses", [str(k) for k in range(4)], ["gender", "married"],
                 rows_over([genders, YESNO], spouses_row)),
        variable("RC_motherOf", [str(k) for k in range(9)], ["gender", "ageSlices", "married"],
                 rows_over([genders, slices, YESNO], mother_row)),
        variable("RC_colleagues", [str(k) for k in range(7)], ["work"],
                 [colleagues_row(w) for w in WORK]),
        variable("RC_friends", [str(k) for k in range(7)], ["ageSlices"],
                 [friends_row(s) for s in slices]),
    ]


def work_marginal():
    sm = slice_marginal()
    out = [0.0] * len(WORK)
    for g in ["male", "female"]:
        for s in range(17):
            for k, p in enumerate(work_row(g, s)):
                out[k] += 0.5 * sm[s] * p
    return out


def copies(side, names):
    """Reduced copy of the agent network for one endpoint."""
    genders = ["male", "female"]
    slices = list(range(17))
    out = []
    for name in names:
        full = f"{side}.{name}"
        if name == "gender":
            out.append(variable(full, genders, [], [[0.5, 0.5]]))
        elif name == "ageSlices":
            out.append(variable(full, SLICES, [], [slice_marginal()]))
        elif name == "location":
            out.append(variable(full, LOCATIONS, [], [LOCATION_PRIOR]))
        elif name == "married":
            out.append(variable(full, YESNO, [f"{side}.gender", f"{side}.ageSlices"],
                                rows_over([genders, slices], married_row)))
        elif name == "work":
            out.append(variable(full, WORK, [], [work_marginal()]))
        else:
            raise ValueError(name)
    return out


def deterministic(name, parents, parent_domains, predicate):
    return variable(name, YESNO, parents,
                    rows_over(parent_domains, lambda *v: [1.0, 0.0] if predicate(*v) else [0.0, 1.0]))


def conjunction(name, parents):
    return deterministic(name, parents, [YESNO] * len(parents),
                         lambda *v: all(x == "yes" for x in v))


def shifted_age(name, parent, offsets, minimum=0):
    """Distribution over slices at the given offsets from the parent slice."""
    rows = []
    for s in range(17):
        row = [0.0] * 17
        for off, w in offsets.items():
            t = s + off
            if minimum <= t < 17:
                row[t] += w
        if sum(row) == 0.0:
            row[s] = 1.0  # unreachable for valid partners; the link stays impossible elsewhere
        rows.append(normalize(row))
    return variable(name, SLICES, [parent], rows)


def same_location(a="a1.location", b="a2.location"):
    return deterministic("sameLocation", [a, b], [LOCATIONS, LOCATIONS], lambda x, y: x == y)


def identity(name, a, b):
    return deterministic(name, [a, b], [SLICES, SLICES], lambda x, y: x == y)


def spouses_bn():
    variables = copies("a1", ["gender", "ageSlices", "married", "location"])
    variables += copies("a2", ["gender", "ageSlices", "married", "location"])
    variables += [
        deterministic("husbandIsMale", ["a1.gender"], [["male", "female"]], lambda g: g == "male"),
        deterministic("wifeIsFemale", ["a2.gender"], [["male", "female"]], lambda g: g == "female"),
        conjunction("bothMarried", ["a1.married", "a2.married"]),
        # First wife about ten years younger than her husband.
        shifted_age("ageWife", "a1.ageSlices",
                    {0: 0.10, -1: 0.25, -2: 0.30, -3: 0.20, -4: 0.10, -5: 0.05}, minimum=3),
        identity("rightAge", "ageWife", "a2.ageSlices"),
        same_location(),
        conjunction("linkSpouses",
                    ["husbandIsMale", "wifeIsFemale", "bothMarried", "rightAge", "sameLocation"]),
    ]
    return variables


def mother_bn():
    variables = copies("a1", ["gender", "ageSlices", "location"])
    variables += copies("a2", ["ageSlices", "location"])
    variables += [
        deterministic("isMother", ["a1.gender"], [["male", "female"]], lambda g: g == "female"),
        shifted_age("childAge", "a1.ageSlices",
                    {-3: 0.08, -4: 0.20, -5: 0.25, -6: 0.20, -7: 0.14, -8: 0.09, -9: 0.04}),
        identity("rightAge", "childAge", "a2.ageSlices"),
        # Young children always live with their mother; adults usually nearby.
        variable("locationOk", YESNO, ["a1.location", "a2.location", "a2.ageSlices"],
                 rows_over([LOCATIONS, LOCATIONS, list(range(17))],
                           lambda x, y, s: [1.0, 0.0] if x == y else
                           ([0.0, 1.0] if s < 4 else [0.3, 0.7]))),
        conjunction("linkMotherOf", ["isMother", "rightAge", "locationOk"]),
    ]
    return variables


def colleagues_bn():
    variables = copies("a1", ["work", "location"]) + copies("a2", ["work", "location"])
    variables += [
        deterministic("sameActivity", ["a1.work", "a2.work"], [WORK, WORK],
                      lambda x, y: x == y and x != "none"),
        same_location(),
        conjunction("linkColleagues", ["sameActivity", "sameLocation"]),
    ]
    return variables


def friend_link_row(age, loc, gender):
    if age == "no":
        return [0.0, 1.0]
    p = (1.0 if loc == "yes" else 0.03) * (1.0 if gender == "yes" else 0.3)
    return [p, 1.0 - p]


def friends_bn():
    variables = copies("a1", ["gender", "ageSlices", "location"])
    variables += copies("a2", ["gender", "ageSlices", "location"])
    variables += [
        shifted_age("friendAge", "a1.ageSlices", {-1: 0.25, 0: 0.50, 1: 0.25}, minimum=1),
        identity("rightAge", "friendAge", "a2.ageSlices"),
        same_location(),
        deterministic("sameGender", ["a1.gender", "a2.gender"], [["male", "female"]] * 2,
                      lambda x, y: x == y),
        variable("linkFriends", YESNO, ["rightAge", "sameLocation", "sameGender"],
                 rows_over([YESNO, YESNO, YESNO], friend_link_row)),
    ]
    return variables


def write(path, variables):
    with open(path, "w", encoding="utf-8") as f:
        f.write('{\n  "format_version": 1,\n  "variables": [\n')
        for i, v in enumerate(variables):
            f.write("    {\n")
            f.write(f'      "name": {json.dumps(v["name"])},\n')
            f.write(f'      "domain": {json.dumps(v["domain"])},\n')
            f.write(f'      "parents": {json.dumps(v["parents"])},\n')
            f.write('      "cpt": [\n')
            f.write(",\n".join("        " + json.dumps(r) for r in v["cpt"]))
            f.write("\n      ]\n    }" + ("," if i + 1 < len(variables) else "") + "\n")
        f.write("  ]\n}\n")


def scenario():
    return {
        "format_version": 1,
        "agent_bn": "agent.bn.json",
        "population_size": 10000,
        "seed": 20240611,
        "link_types": [
            {"name": "spouses", "kind": "matching", "directed": False,
             "bn": "spouses.bn.json", "link_variable": "linkSpouses",
             "rc_a": "RC_spouses", "rc_b": "RC_spouses"},
            {"name": "motherOf", "kind": "matching", "directed": True,
             "bn": "motherOf.bn.json", "link_variable": "linkMotherOf",
             "rc_a": "RC_motherOf", "rc_b": 1},
            {"name": "colleagues", "kind": "matching", "same": True,
             "bn": "colleagues.bn.json", "link_variable": "linkColleagues",
             "rc_a": "RC_colleagues"},
            {"name": "friends", "kind": "matching", "same": True,
             "bn": "friends.bn.json", "link_variable": "linkFriends",
             "rc_a": "RC_friends"},
            {"name": "fatherOf", "kind": "transitive", "directed": True},
            {"name": "siblings", "kind": "transitive"},
            {"name": "acquaintances", "kind": "transitive"},
        ],
        "transitive_rules": [
            {"create": "fatherOf", "hop1": {"type": "spouses", "orientation": "either"},
             "hop2": {"type": "motherOf", "orientation": "forward"},
             "probability": 1.0, "create_directed_from": "x"},
            {"create": "siblings", "hop1": {"type": "motherOf", "orientation": "backward"},
             "hop2": {"type": "motherOf", "orientation": "forward"}, "probability": 1.0},
            {"create": "acquaintances", "hop1": {"type": "friends", "orientation": "either"},
             "hop2": {"type": "friends", "orientation": "either"}, "probability": 0.1},
        ],
        "interaction_weights": {
            "spouses": 0.1, "motherOf": 0.1, "fatherOf": 0.05, "colleagues": 0.3,
            "friends": 0.6, "siblings": 0.4, "acquaintances": 0.1,
        },
    }


def main():
    write("agent.bn.json", agent_bn())
    write("spouses.bn.json", spouses_bn())
    write("motherOf.bn.json", mother_bn())
    write("colleagues.bn.json", colleagues_bn())
    write("friends.bn.json", friends_bn())
    with open("kenya.scenario.json", "w", encoding="utf-8") as f:
        json.dump(scenario(), f, indent=2)
        f.write("\n")


if __name__ == "__main__":
    main()
