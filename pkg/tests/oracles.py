"""Direct-summation reference implementations used as test oracles.

Plain Python loops over pixels, written without importing odvkit, so
a shared bug cannot make an implementation agree with its oracle.
"""

import math


def lat_weight(v, height):
    return math.cos((v - height / 2 + 0.5) * math.pi / height)


def mse(x, y):
    h, w = len(x), len(x[0])
    total = 0.0
    for i in range(h):
        for j in range(w):
            d = x[i][j] - y[i][j]
            total += d * d
    return total / (h * w)


def psnr(x, y, peak=1.0):
    m = mse(x, y)
    return math.inf if m == 0 else 10 * math.log10(peak * peak / m)


def ws_psnr(x, y, peak=1.0):
    h, w = len(x), len(x[0])
    num = den = 0.0
    for i in range(h):
        wt = lat_weight(i, h)
        for j in range(w):
            d = x[i][j] - y[i][j]
            num += wt * d * d
            den += wt
    m = num / den
    return math.inf if m == 0 else 10 * math.log10(peak * peak / m)


def _gauss(size=11, sigma=1.5):
    g = [math.exp(-((k - (size - 1) / 2) ** 2) / (2 * sigma * sigma)) for k in range(size)]
    s = sum(g)
    return [v / s for v in g]


def ssim_map(x, y, peak=1.0):
    """Window-by-window SSIM; every window lies fully inside the frame."""
    g = _gauss()
    c1 = (0.01 * peak) ** 2
    c2 = (0.03 * peak) ** 2
    h, w = len(x), len(x[0])
    out = []
    for i in range(h - 10):
        row = []
        for j in range(w - 10):
            mx = my = sxx = syy = sxy = 0.0
            for a in range(11):
                for b in range(11):
                    wt = g[a] * g[b]
                    p = x[i + a][j + b]
                    q = y[i + a][j + b]
                    mx += wt * p
                    my += wt * q
                    sxx += wt * p * p
                    syy += wt * q * q
                    sxy += wt * p * q
            sxx -= mx * mx
            syy -= my * my
            sxy -= mx * my
            row.append(((2 * mx * my + c1) * (2 * sxy + c2)) / ((mx * mx + my * my + c1) * (sxx + syy + c2)))
        out.append(row)
    return out


def ssim(x, y):
    m = ssim_map(x, y)
    return sum(sum(r) for r in m) / (len(m) * len(m[0]))


def ws_ssim(x, y):
    m = ssim_map(x, y)
    h = len(x)
    num = den = 0.0
    for i, r in enumerate(m):
        wt = lat_weight(i + 5, h)
        for val in r:
            num += wt * val
            den += wt
    return num / den


def bilinear(f, u, v):
    """Sample a list-of-lists frame with horizontal wrap and vertical clamp."""
    h, w = len(f), len(f[0])
    v = min(max(v, 0.0), h - 1)
    u = u % w
    j0 = int(math.floor(u))
    i0 = int(math.floor(v))
    a = u - j0
    b = v - i0
    j1 = (j0 + 1) % w
    j0 = j0 % w
    i1 = min(i0 + 1, h - 1)
    top = f[i0][j0] * (1 - a) + f[i0][j1] * a
    bot = f[i1][j0] * (1 - a) + f[i1][j1] * a
    return top * (1 - b) + bot * b


def warping_error(frames, flows, masks=None):
    """Raw (unscaled) masked flow-compensated MSE averaged over consecutive pairs."""
    n = len(frames)
    h, w = len(frames[0]), len(frames[0][0])
    total = 0.0
    for t in range(n - 1):
        num = den = 0.0
        for i in range(h):
            for j in range(w):
                m = 1.0 if masks is None else masks[t][i][j]
                pred = bilinear(frames[t], j + flows[t][0][i][j], i + flows[t][1][i][j])
                d = frames[t + 1][i][j] - pred
                num += m * d * d
                den += m
        total += num / den
    return total / (n - 1)


def deformable(src, weights, offsets, masks, taps):
    """Scalar modulated deformable sampling over lists."""
    c_in = len(src)
    h, w = len(src[0]), len(src[0][0])
    c_out = len(weights)
    out = [[[0.0] * w for _ in range(h)] for _ in range(c_out)]
    for o in range(c_out):
        for y in range(h):
            for x in range(w):
                acc = 0.0
                for k, (du, dv) in enumerate(taps):
                    u = x + du + offsets[k][0][y][x]
                    v = y + dv + offsets[k][1][y][x]
                    for c in range(c_in):
                        acc += weights[o][c][k] * masks[k][y][x] * bilinear(src[c], u, v)
                out[o][y][x] = acc
    return out


def lsa_total(hr, sr, w_lat, w_sal, eps=1e-3, a2=0.1, b2=0.1):
    h, w = len(hr), len(hr[0])
    n = h * w
    ch = ll = ls = 0.0
    for i in range(h):
        for j in range(w):
            d = hr[i][j] - sr[i][j]
            ch += math.sqrt(d * d + eps * eps)
            ll += w_lat[i][j] * abs(d)
            ls += w_sal[i][j] * abs(d)
    return ch / n + a2 * ll / n + b2 * ls / n


def sad_flow(a, b, block, radius):
    """Exhaustive block SAD search with the documented tie-break order."""
    h, w = len(a), len(a[0])
    flow_u = [[0] * w for _ in range(h)]
    flow_v = [[0] * w for _ in range(h)]
    for by in range(0, h, block):
        for bx in range(0, w, block):
            best = None
            for du in range(-radius, radius + 1):
                for dv in range(-radius, radius + 1):
                    sad = 0.0
                    for i in range(by, min(by + block, h)):
                        for j in range(bx, min(bx + block, w)):
                            ii = min(max(i + dv, 0), h - 1)
                            sad += abs(b[i][j] - a[ii][(j + du) % w])
                    key = (sad, du * du + dv * dv, du, dv)
                    if best is None or key < best:
                        best = key
            for i in range(by, min(by + block, h)):
                for j in range(bx, min(bx + block, w)):
                    flow_u[i][j] = best[2]
                    flow_v[i][j] = best[3]
    return flow_u, flow_v
