"""Published values of the d(t, v) bounds, used for comparison output and
in the test suite.  Keys are ``(t, v)``; values are as printed (2 decimals).
"""

_V = range(2, 11)

OPTIMIZED = {
    (t, v): val
    for t, row in {
        2: [1, 3.97, 8.16, 13.72, 20.65, 28.98, 38.68, 49.78, 62.25],
        3: [7.56, 32.03, 81.35, 163.91, 288.03, 462.05, 694.28, 993.05, 1366.68],
        4: [27.32, 158.65, 518.55, 1281.78, 2672.98, 4966.64, 8487.15, 13608.84, 20755.89],
        5: [79.74, 658.21, 2816.81, 8635.15, 21523.56, 46555.89, 90802.26, 163661.74,
            277195.09],
        6: [209.13, 2503.83, 14162.67, 54108.77, 161643.64, 407676.24, 908447.35,
            1841749.21, 3465640.41],
    }.items()
    for v, val in zip(_V, row)
}

LLL_CLASSIC = {
    **{(2, v): x for v, x in zip(_V, [2.41, 5.89, 10.74, 16.98, 24.61, 33.62, 44.01, 55.80, 68.97])},
    **{(6, v): x for v, x in zip(_V, [220.07, 2524.79, 14193.92, 54150.39, 161695.64, 407738.63])},
}

EC_GENERAL = {
    **{(2, v): x for v, x in zip(_V, [2.0, 5.13, 9.64, 15.53, 22.81, 31.48, 41.53, 52.96, 65.79])},
    **{(6, v): x for v, x in zip(_V, [218.32, 2521.32, 14188.72, 54143.46, 161686.98, 407728.23])},
}

#: least-squares slopes of best-known sizes against log2 k for t = 2;
#: depends on the snapshot of best-known sizes, never asserted
REGRESSION_SLOPE_T2 = dict(zip(_V, [1.02, 2.84, 5.15, 7.935, 11.83, 15.49, 19.55, 21.99, 25.83]))
