"""Reference values transcribed from the published computation.

These are the numbers the recomputation is compared against.  They are
data, not inputs: nothing in the pipeline reads them except the
discrepancy report and the tests.  Where a printed value is known to be
off, it is still transcribed as printed.
"""

from __future__ import annotations

from fractions import Fraction

EPSILON = Fraction(1, 4)

# omega -> (lower, upper) as displayed, three significant figures or fewer
INTERVALS = {
    14: ("1.30e16", "4.3e16"),
    13: ("3.04e14", "1.07e16"),
    12: ("7.42e12", "2.47e15"),
    11: ("2.00e11", "5.12e14"),
    10: ("6.46e9", "9.33e13"),
    9: ("2.23e8", "1.5e13"),
    8: ("9.69e6", "2e12"),
}
SMALL_OMEGA_INTERVAL = ("2", "2.2e11")  # 2 <= omega <= 7 merged
OMEGA7_INTERVAL = ("5.10e5", "2.2e11")  # the same range when printed per omega

# k used for omega ranges whose intervals are empty
K_REGIMES = {(15, 27): 2, (28, 47): 3}
OMEGA47_UPPER = "3.7e29"
OMEGA47_LOWER_EXPONENT = 84  # primorial(47) > 10^84

OMEGA_ONE_THRESHOLD = 1600
LARGE_OMEGA_FROM = 48
QUALIFYING_PRIMES_START = (211, 331, 421, 631)
THREE_RUN_EXAMPLE = 211
SMALLEST_PAIR_PRIME = 31

# (omega, p, n): n and n+1 are the smallest consecutive QNRNPs mod p
DIRECT_WITNESSES = [
    (9, 300690391, 14),
    (9, 340510171, 7),
    (9, 358888531, 18),
    (9, 397687291, 2),
    (9, 14999999667511, 42),
    (9, 14999999931841, 122),
    (9, 14999999943391, 11),
    (9, 14999999984971, 7),
    (8, 13123111, 14),
    (8, 14804791, 6),
    (8, 16546531, 2),
    (8, 17160991, 6),
    (8, 1999999986307, 11),
    (8, 1999999987441, 106),
    (8, 1999999993291, 26),
    (8, 1999999998391, 23),
    (7, 870871, 6),
    (7, 903211, 7),
    (7, 930931, 2),
    (7, 1138831, 6),
    (7, 219999995671, 14),
    (7, 219999995911, 11),
    (7, 219999997561, 78),
    (7, 219999998011, 14),
]

# divisor-tree leaves: (omega, excluded, forced, level, D)
BRANCHES = [
    (14, (), (2, 3, 5, 7, 11, 13, 17), 0, 510150),
    (13, (5,), (2, 3, 7, 11, 13, 17, 19, 23, 31), 1, 40112098026),
    (13, (7,), (2, 3, 5, 11, 13, 17, 19), 1, 1385670),
    (12, (3, 5), (2, 7, 11, 13, 17, 19, 23, 29, 31), 2, 13370699342),
    (12, (3, 7), (2, 5, 11, 13, 17, 19, 23, 29, 31), 2, 9550499530),
    (12, (3, 11), (2, 5, 7, 13, 17, 19, 23, 29, 31), 2, 6077590610),
    (12, (3, 13), (2, 5, 7, 11, 17, 19, 23), 2, 5720330),
    (11, (3, 5, 7), (2, 11, 13, 17, 19, 23, 29), 3, 61616126),
    (11, (3, 5, 11), (2, 7, 13, 17, 19, 23, 29), 3, 39210262),
    (11, (3, 5, 13), (2, 7, 11, 17, 19, 23), 3, 1144066),
    (10, (3, 5, 7, 11), (2, 13, 17, 19), 4, 8398),
]

# (omega, D, initial list size, final list size)
BRANCH_COUNTS = [
    (14, 510150, 58, 23),
    (13, 40112098026, 541, 355),
    (13, 1385670, 10836, 5101),
    (12, 13370699342, 918, 401),
    (12, 9550499530, 1226, 556),
    (12, 6077590610, 1870, 960),
    (12, 5720330, 66588, 32606),
    (11, 61616126, 16476, 6494),
    (11, 39210262, 25026, 10736),
    (11, 1144066, 203695, 91556),
    (10, 8398, 1860405, 766110),
]
FLAGSHIP_D = 40112098026
FLAGSHIP_OMEGA = 13
FLAGSHIP_FINAL_PROSE = 335  # the count stated in the running text

# omega = 14, D = 510510: sample of the initial list as (index, p)
OMEGA14_INITIAL = [
    (1, 18826412648012971),
    (2, 19835154277048111),
    (3, 21275256232500271),
    (4, 21379146566387611),
    (5, 21601768710431911),
    (6, 22367301631564891),
    (55, 42619705834095391),
    (56, 42630431460306691),
    (57, 42767004434063911),
    (58, 42923340584394271),
]

# omega = 14 final list in full as (index, p, n)
OMEGA14_FINAL = [
    (1, 18826412648012971, 2),
    (2, 19835154277048111, 6),
    (3, 21275256232500271, 6),
    (4, 21379146566387611, 2),
    (5, 21601768710431911, 14),
    (6, 22367301631564891, 7),
    (7, 25640565284964631, 22),
    (8, 26584894648201891, 2),
    (9, 29092620026239771, 2),
    (10, 29334177846903931, 7),
    (11, 29347815960232771, 2),
    (12, 29510839290242311, 11),
    (13, 30078810535603831, 6),
    (14, 31546069586121091, 2),
    (15, 32413544794200571, 2),
    (16, 32866449199073491, 7),
    (17, 32951626367229571, 7),
    (18, 33037382063696011, 7),
    (19, 33607319649613711, 11),
    (20, 34348681796839411, 18),
    (21, 34429617659146711, 6),
    (22, 35226243925943071, 6),
    (23, 35923793310615211, 7),
]

# flagship branch: initial list sample (index, p) and final list sample (index, p, n)
FLAGSHIP_INITIAL = [
    (1, 386480064480511),
    (2, 405332750552731),
    (3, 437823549953791),
    (539, 10691358271555963),
    (540, 10694085894221731),
    (541, 10698097104024331),
]
FLAGSHIP_FINAL = [
    (1, 386480064480511, 11),
    (2, 405332750552731, 2),
    (3, 437823549953791, 6),
    (4, 485155825624471, 11),
    (5, 583831586768431, 6),
    (6, 586238312649991, 6),
    (351, 8339505740095531, 26),
    (352, 8361166273029571, 2),
    (353, 8541269593166311, 6),
    (354, 8598228772363231, 6),
    (355, 8625906120001171, 7),
]

# omega = 13, D = 1385670: final list sample (index, p, n)
D1385670_FINAL = [
    (1, 386480064480511, 11),
    (2, 405332750552731, 2),
    (3, 437823549953791, 6),
    (4, 461282657605771, 2),
    (5, 485155825624471, 11),
    (6, 493095254682031, 6),
    (7, 520169805385231, 11),
    (8, 568815710072611, 7),
    (9, 579056953164691, 10),
    (10, 583831586768431, 6),
    (11, 586238312649991, 6),
    (12, 618991915451911, 6),
    (13, 660756239273131, 11),
    (14, 682507347912391, 6),
    (15, 683970837139591, 6),
    (16, 695770219033891, 2),
    (17, 712190300451631, 6),
    (18, 722549685767911, 6),
    (19, 737211950565091, 7),
    (20, 748537037017771, 7),
    (5091, 8234386164494491, 10),
    (5092, 8266902842668471, 11),
    (5093, 8288964496582771, 7),
    (5094, 8294981311286671, 6),
    (5095, 8296986916187971, 2),
    (5096, 8333488925391631, 6),
    (5097, 8339505740095531, 26),
    (5098, 8361166273029571, 2),
    (5099, 8541269593166311, 6),
    (5100, 8598228772363231, 6),
    (5101, 8625906120001171, 7),
]

# the worked omega = 14 example: excluding 13, and then 17
TREE_EXAMPLE = {
    "exclude_13_lower_exceeds": "4.7e16",
    "exclude_17_lower_at_least": "3.6e16",
    "exclude_17_upper_below": "3.2e16",
}
