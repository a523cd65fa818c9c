"""Brute-force reference implementations used to cross-check the library.

Everything here is written with explicit python loops (and exact rational
accumulation where bit-equality is asserted), deliberately independent of
the vectorized numpy/scipy/torch paths under test.
"""

import math
from fractions import Fraction


def l1_sum_loop(pred, gt):
    """Elementwise |pred-gt| accumulated exactly, then rounded once."""
    total = Fraction(0)
    h, w = len(pred), len(pred[0])
    for y in range(h):
        for x in range(w):
            total += Fraction(abs(float(pred[y][x]) - float(gt[y][x])))
    return float(total)


def sad_bruteforce(pred, gt):
    return l1_sum_loop(pred, gt) / 1000.0


def mse_bruteforce(pred, gt):
    total = Fraction(0)
    h, w = len(pred), len(pred[0])
    for y in range(h):
        for x in range(w):
            d = float(pred[y][x]) - float(gt[y][x])
            total += Fraction(d * d)
    return float(total) / (h * w)


def _gauss(x, sigma):
    return math.exp(-x * x / (2.0 * sigma * sigma)) / (sigma * math.sqrt(2.0 * math.pi))


def _dgauss(x, sigma):
    return -x * _gauss(x, sigma) / (sigma * sigma)


def derivative_kernels_loop(sigma=1.4):
    eps = 1e-2
    half = math.ceil(sigma * math.sqrt(-2.0 * math.log(math.sqrt(2.0 * math.pi) * sigma * eps)))
    size = 2 * half + 1
    hx = [[_gauss(i - half, sigma) * _dgauss(j - half, sigma)
           for j in range(size)] for i in range(size)]
    norm = math.sqrt(sum(v * v for row in hx for v in row))
    hx = [[v / norm for v in row] for row in hx]
    hy = [[hx[j][i] for j in range(size)] for i in range(size)]
    return hx, hy, half


def _convolve_nearest(img, kernel, half):
    """True convolution (kernel flipped) with replicated borders."""
    h, w = len(img), len(img[0])
    out = [[0.0] * w for _ in range(h)]
    for y in range(h):
        for x in range(w):
            acc = 0.0
            for dy in range(-half, half + 1):
                yy = min(max(y - dy, 0), h - 1)
                for dx in range(-half, half + 1):
                    xx = min(max(x - dx, 0), w - 1)
                    acc += img[yy][xx] * kernel[half + dy][half + dx]
            out[y][x] = acc
    return out


def gradient_bruteforce(pred, gt, sigma=1.4):
    hx, hy, half = derivative_kernels_loop(sigma)
    pred = [[float(v) for v in row] for row in pred]
    gt = [[float(v) for v in row] for row in gt]

    def amplitude(img):
        gx = _convolve_nearest(img, hx, half)
        gy = _convolve_nearest(img, hy, half)
        return [[math.sqrt(gx[y][x] ** 2 + gy[y][x] ** 2)
                 for x in range(len(img[0]))] for y in range(len(img))]

    ap = amplitude(pred)
    ag = amplitude(gt)
    total = math.fsum((ap[y][x] - ag[y][x]) ** 2
                      for y in range(len(pred)) for x in range(len(pred[0])))
    return total / 1000.0


def _largest_component_floodfill(mask):
    """Largest 4-connected True region; first-in-raster-order wins ties."""
    h, w = len(mask), len(mask[0])
    seen = [[False] * w for _ in range(h)]
    best = set()
    for sy in range(h):
        for sx in range(w):
            if not mask[sy][sx] or seen[sy][sx]:
                continue
            stack = [(sy, sx)]
            seen[sy][sx] = True
            comp = set()
            while stack:
                y, x = stack.pop()
                comp.add((y, x))
                for ny, nx in ((y - 1, x), (y + 1, x), (y, x - 1), (y, x + 1)):
                    if 0 <= ny < h and 0 <= nx < w and mask[ny][nx] \
                            and not seen[ny][nx]:
                        seen[ny][nx] = True
                        stack.append((ny, nx))
            if len(comp) > len(best):
                best = comp
    return best


def connectivity_bruteforce(pred, gt, step=0.1, theta=0.15):
    pred = [[float(v) for v in row] for row in pred]
    gt = [[float(v) for v in row] for row in gt]
    h, w = len(pred), len(pred[0])
    n_steps = round(1.0 / step)
    l_map = [[-1.0] * w for _ in range(h)]
    for i in range(1, n_steps + 1):
        level = i * step
        mask = [[pred[y][x] >= level and gt[y][x] >= level
                 for x in range(w)] for y in range(h)]
        comp = _largest_component_floodfill(mask)
        for y in range(h):
            for x in range(w):
                if l_map[y][x] == -1.0 and (y, x) not in comp:
                    l_map[y][x] = (i - 1) * step
    deficits = []
    for y in range(h):
        for x in range(w):
            level = l_map[y][x] if l_map[y][x] != -1.0 else 1.0
            pd = pred[y][x] - level
            gd = gt[y][x] - level
            p_phi = 1.0 - pd * (1 if pd >= theta else 0)
            g_phi = 1.0 - gd * (1 if gd >= theta else 0)
            deficits.append(abs(p_phi - g_phi))
    return math.fsum(deficits) / 1000.0


def ssim_global_formula(pred, gt, c1, c2):
    """Literal whole-image SSIM using loop-computed moments."""
    h, w = len(pred), len(pred[0])
    n = h * w
    vals_p = [float(pred[y][x]) for y in range(h) for x in range(w)]
    vals_g = [float(gt[y][x]) for y in range(h) for x in range(w)]
    mu_p = math.fsum(vals_p) / n
    mu_g = math.fsum(vals_g) / n
    var_p = math.fsum((v - mu_p) ** 2 for v in vals_p) / n
    var_g = math.fsum((v - mu_g) ** 2 for v in vals_g) / n
    cov = math.fsum((vals_p[i] - mu_p) * (vals_g[i] - mu_g)
                    for i in range(n)) / n
    ssim = ((2 * mu_p * mu_g + c1) * (2 * cov + c2)) \
        / ((mu_p ** 2 + mu_g ** 2 + c1) * (var_p + var_g + c2))
    return 1.0 - ssim


def normalize_weights_hand(raw_a, raw_b, eps):
    total = raw_a + raw_b
    if total == 0:
        return 0.5 + eps, 0.5 + eps
    return raw_a / total + eps, raw_b / total + eps
