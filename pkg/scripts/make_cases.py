#!/usr/bin/env python3
"""Regenerate the bundled JSON case files in data/.

Sources: the New England 39-bus test system (10 machines, 46 lines) with
the classical machine constants (inertia and transient reactance on the
100 MVA system base) that circulate with it, and the IEEE 118-bus test
system (186 branches; the 19 dispatched units are modeled as machines).

Machine constants for the 118-bus system are not distributed with the
static case; this script assigns inertia and transient reactance by a
capacity rule (H = 6 s and xd' = 0.25 p.u. at 100 MVA, scaled by Pmax).
See data/README.md for the full conversion note.
"""

import json
import pathlib

OUT = pathlib.Path(__file__).resolve().parent.parent / "data"

# ---------------------------------------------------------------- 39-bus
# bus id: Pd (MW)
BUS39 = {
    1: 97.6, 2: 0, 3: 322, 4: 500, 5: 0, 6: 0, 7: 233.8, 8: 522, 9: 6.5,
    10: 0, 11: 0, 12: 8.5, 13: 0, 14: 0, 15: 320, 16: 329, 17: 0, 18: 158,
    19: 0, 20: 680, 21: 274, 22: 0, 23: 247.5, 24: 308.6, 25: 224, 26: 139,
    27: 281, 28: 206, 29: 283.5, 30: 0, 31: 9.2, 32: 0, 33: 0, 34: 0,
    35: 0, 36: 0, 37: 0, 38: 0, 39: 1104,
}

# (from, to, x_pu)
BRANCH39 = [
    (1, 2, 0.0411), (1, 39, 0.0250), (2, 3, 0.0151), (2, 25, 0.0086),
    (2, 30, 0.0181), (3, 4, 0.0213), (3, 18, 0.0133), (4, 5, 0.0128),
    (4, 14, 0.0129), (5, 6, 0.0026), (5, 8, 0.0112), (6, 7, 0.0092),
    (6, 11, 0.0082), (6, 31, 0.0250), (7, 8, 0.0046), (8, 9, 0.0363),
    (9, 39, 0.0250), (10, 11, 0.0043), (10, 13, 0.0043), (10, 32, 0.0200),
    (12, 11, 0.0435), (12, 13, 0.0435), (13, 14, 0.0101), (14, 15, 0.0217),
    (15, 16, 0.0094), (16, 17, 0.0089), (16, 19, 0.0195), (16, 21, 0.0135),
    (16, 24, 0.0059), (17, 18, 0.0082), (17, 27, 0.0173), (19, 20, 0.0138),
    (19, 33, 0.0142), (20, 34, 0.0180), (21, 22, 0.0140), (22, 23, 0.0096),
    (22, 35, 0.0143), (23, 24, 0.0350), (23, 36, 0.0272), (25, 26, 0.0323),
    (25, 37, 0.0232), (26, 27, 0.0147), (26, 28, 0.0474), (26, 29, 0.0625),
    (28, 29, 0.0151), (29, 38, 0.0156),
]

# machine order G1..G10: (bus, Pg, Pmax, H_s, xd'_pu)
GEN39 = [
    (39, 1000.0, 1100.0, 500.0, 0.0060),   # G1, aggregated external system
    (31, 677.871, 646.0, 30.3, 0.0697),    # G2, slack
    (32, 650.0, 725.0, 35.8, 0.0531),      # G3
    (33, 632.0, 652.0, 28.6, 0.0436),      # G4
    (34, 508.0, 508.0, 26.0, 0.1320),      # G5
    (35, 650.0, 687.0, 34.8, 0.0500),      # G6
    (36, 560.0, 580.0, 26.4, 0.0490),      # G7
    (37, 540.0, 564.0, 24.3, 0.0570),      # G8
    (38, 830.0, 865.0, 34.5, 0.0570),      # G9
    (30, 250.0, 1040.0, 42.0, 0.0310),     # G10
]

SLACK39 = 31

# --------------------------------------------------------------- 118-bus
# bus id: Pd (MW)
BUS118 = {
    1: 51, 2: 20, 3: 39, 4: 39, 5: 0, 6: 52, 7: 19, 8: 28, 9: 0, 10: 0,
    11: 70, 12: 47, 13: 34, 14: 14, 15: 90, 16: 25, 17: 11, 18: 60,
    19: 45, 20: 18, 21: 14, 22: 10, 23: 7, 24: 13, 25: 0, 26: 0, 27: 71,
    28: 17, 29: 24, 30: 0, 31: 43, 32: 59, 33: 23, 34: 59, 35: 33,
    36: 31, 37: 0, 38: 0, 39: 27, 40: 66, 41: 37, 42: 96, 43: 18,
    44: 16, 45: 53, 46: 28, 47: 34, 48: 20, 49: 87, 50: 17, 51: 17,
    52: 18, 53: 23, 54: 113, 55: 63, 56: 84, 57: 12, 58: 12, 59: 277,
    60: 78, 61: 0, 62: 77, 63: 0, 64: 0, 65: 0, 66: 39, 67: 28, 68: 0,
    69: 0, 70: 66, 71: 0, 72: 12, 73: 6, 74: 68, 75: 47, 76: 68,
    77: 61, 78: 71, 79: 39, 80: 130, 81: 0, 82: 54, 83: 20, 84: 11,
    85: 24, 86: 21, 87: 0, 88: 48, 89: 0, 90: 163, 91: 10, 92: 65,
    93: 12, 94: 30, 95: 42, 96: 38, 97: 15, 98: 34, 99: 42, 100: 37,
    101: 22, 102: 5, 103: 23, 104: 38, 105: 31, 106: 43, 107: 50,
    108: 2, 109: 8, 110: 39, 111: 0, 112: 68, 113: 6, 114: 8, 115: 22,
    116: 184, 117: 20, 118: 33,
}

BRANCH118 = [
    (1, 2, 0.0999), (1, 3, 0.0424), (4, 5, 0.00798), (3, 5, 0.108),
    (5, 6, 0.054), (6, 7, 0.0208), (8, 9, 0.0305), (8, 5, 0.0267),
    (9, 10, 0.0322), (4, 11, 0.0688), (5, 11, 0.0682), (11, 12, 0.0196),
    (2, 12, 0.0616), (3, 12, 0.16), (7, 12, 0.034), (11, 13, 0.0731),
    (12, 14, 0.0707), (13, 15, 0.2444), (14, 15, 0.195), (12, 16, 0.0834),
    (15, 17, 0.0437), (16, 17, 0.1801), (17, 18, 0.0505), (18, 19, 0.0493),
    (19, 20, 0.117), (15, 19, 0.0394), (20, 21, 0.0849), (21, 22, 0.097),
    (22, 23, 0.159), (23, 24, 0.0492), (23, 25, 0.08), (26, 25, 0.0382),
    (25, 27, 0.163), (27, 28, 0.0855), (28, 29, 0.0943), (30, 17, 0.0388),
    (8, 30, 0.0504), (26, 30, 0.086), (17, 31, 0.1563), (29, 31, 0.0331),
    (23, 32, 0.1153), (31, 32, 0.0985), (27, 32, 0.0755), (15, 33, 0.1244),
    (19, 34, 0.247), (35, 36, 0.0102), (35, 37, 0.0497), (33, 37, 0.142),
    (34, 36, 0.0268), (34, 37, 0.0094), (38, 37, 0.0375), (37, 39, 0.106),
    (37, 40, 0.168), (30, 38, 0.054), (39, 40, 0.0605), (40, 41, 0.0487),
    (40, 42, 0.183), (41, 42, 0.135), (43, 44, 0.2454), (34, 43, 0.1681),
    (44, 45, 0.0901), (45, 46, 0.1356), (46, 47, 0.127), (46, 48, 0.189),
    (47, 49, 0.0625), (42, 49, 0.323), (42, 49, 0.323), (45, 49, 0.186),
    (48, 49, 0.0505), (49, 50, 0.0752), (49, 51, 0.137), (51, 52, 0.0588),
    (52, 53, 0.1635), (53, 54, 0.122), (49, 54, 0.289), (49, 54, 0.291),
    (54, 55, 0.0707), (54, 56, 0.00955), (55, 56, 0.0151), (56, 57, 0.0966),
    (50, 57, 0.134), (56, 58, 0.0966), (51, 58, 0.0719), (54, 59, 0.2293),
    (56, 59, 0.251), (56, 59, 0.239), (55, 59, 0.2158), (59, 60, 0.145),
    (59, 61, 0.15), (60, 61, 0.0135), (60, 62, 0.0561), (61, 62, 0.0376),
    (63, 59, 0.0386), (63, 64, 0.02), (64, 61, 0.0268), (38, 65, 0.0986),
    (64, 65, 0.0302), (49, 66, 0.0919), (49, 66, 0.0919), (62, 66, 0.218),
    (62, 67, 0.117), (65, 66, 0.037), (66, 67, 0.1015), (65, 68, 0.016),
    (47, 69, 0.2778), (49, 69, 0.324), (68, 69, 0.037), (69, 70, 0.127),
    (24, 70, 0.4115), (70, 71, 0.0355), (24, 72, 0.196), (71, 72, 0.18),
    (71, 73, 0.0454), (70, 74, 0.1323), (70, 75, 0.141), (69, 75, 0.122),
    (74, 75, 0.0406), (76, 77, 0.148), (69, 77, 0.101), (75, 77, 0.1999),
    (77, 78, 0.0124), (78, 79, 0.0244), (77, 80, 0.0485), (77, 80, 0.105),
    (79, 80, 0.0704), (68, 81, 0.0202), (81, 80, 0.037), (77, 82, 0.0853),
    (82, 83, 0.03665), (83, 84, 0.132), (83, 85, 0.148), (84, 85, 0.0641),
    (85, 86, 0.123), (86, 87, 0.2074), (85, 88, 0.102), (85, 89, 0.173),
    (88, 89, 0.0712), (89, 90, 0.188), (89, 90, 0.0997), (90, 91, 0.0836),
    (89, 92, 0.0505), (89, 92, 0.1581), (91, 92, 0.1272), (92, 93, 0.0848),
    (92, 94, 0.158), (93, 94, 0.0732), (94, 95, 0.0434), (80, 96, 0.182),
    (82, 96, 0.053), (94, 96, 0.0869), (80, 97, 0.0934), (80, 98, 0.108),
    (80, 99, 0.206), (92, 100, 0.295), (94, 100, 0.058), (95, 96, 0.0547),
    (96, 97, 0.0885), (98, 100, 0.179), (99, 100, 0.0813), (100, 101, 0.1262),
    (92, 102, 0.0559), (101, 102, 0.112), (100, 103, 0.0525),
    (100, 104, 0.204), (103, 104, 0.1584), (103, 105, 0.1625),
    (100, 106, 0.229), (104, 105, 0.0378), (105, 106, 0.0547),
    (105, 107, 0.183), (105, 108, 0.0703), (106, 107, 0.183),
    (108, 109, 0.0288), (103, 110, 0.1813), (109, 110, 0.0762),
    (110, 111, 0.0755), (110, 112, 0.064), (17, 113, 0.0301),
    (32, 113, 0.203), (32, 114, 0.0612), (27, 115, 0.0741),
    (114, 115, 0.0104), (68, 116, 0.00405), (12, 117, 0.14),
    (75, 118, 0.0481), (76, 118, 0.0544),
]

# dispatched units only; (bus, Pg, Pmax)
GEN118 = [
    (10, 450.0, 550.0), (12, 85.0, 185.0), (25, 220.0, 320.0),
    (26, 314.0, 414.0), (31, 7.0, 107.0), (46, 19.0, 119.0),
    (49, 204.0, 304.0), (54, 48.0, 148.0), (59, 155.0, 255.0),
    (61, 160.0, 260.0), (65, 391.0, 491.0), (66, 392.0, 492.0),
    (69, 516.4, 805.2), (80, 477.0, 577.0), (87, 4.0, 104.0),
    (89, 607.0, 707.0), (100, 252.0, 352.0), (103, 40.0, 140.0),
    (111, 36.0, 136.0),
]

SLACK118 = 69


def case39() -> dict:
    return {
        "base_mva": 100.0,
        "base_freq_hz": 60.0,
        "slack_bus": SLACK39,
        "buses": [{"id": b, "pd_mw": pd} for b, pd in sorted(BUS39.items())],
        "branches": [
            {"from": i, "to": j, "x_pu": x} for i, j, x in BRANCH39
        ],
        "gens": [
            {
                "bus": bus, "pg_mw": pg, "pg_max_mw": pmax,
                "inertia_s": h, "xd_prime_pu": xdp, "vm_pu": 1.0,
            }
            for bus, pg, pmax, h, xdp in GEN39
        ],
    }


def case118() -> dict:
    gens = []
    for bus, pg, pmax in GEN118:
        scale = pmax / 100.0
        gens.append(
            {
                "bus": bus, "pg_mw": pg, "pg_max_mw": pmax,
                "inertia_s": round(6.0 * scale, 4),
                "xd_prime_pu": round(0.25 / scale, 5),
                "vm_pu": 1.0,
            }
        )
    return {
        "base_mva": 100.0,
        "base_freq_hz": 60.0,
        "slack_bus": SLACK118,
        "buses": [{"id": b, "pd_mw": float(pd)} for b, pd in sorted(BUS118.items())],
        "branches": [
            {"from": i, "to": j, "x_pu": x} for i, j, x in BRANCH118
        ],
        "gens": gens,
    }


def main() -> None:
    OUT.mkdir(exist_ok=True)
    for name, doc in [("case39.json", case39()), ("case118.json", case118())]:
        path = OUT / name
        path.write_text(json.dumps(doc, indent=1, sort_keys=True) + "\n")
        print(f"wrote {path} ({len(doc['buses'])} buses, "
              f"{len(doc['branches'])} branches, {len(doc['gens'])} gens)")


if __name__ == "__main__":
    main()
