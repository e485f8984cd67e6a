"""Compiled fixed-step integrator.

Generalized coordinates: ``q = [θ_M1, θ_I1, θ_M2, θ_I2, θ_c, (x, y, φ) per free body]``.
The palm is a kinematic vertical slider (``palm = [y, vy]``).  Finger 1 sits at
+x, finger 2 (crawler) at -x.

Link ids: -1 static, 0 palm, 1 PP1, 2 DP1, 3 PP2, 4 DP2, 5 + k free body k.
"""
from __future__ import annotations

import math

import numba
import numpy as np

from graspforge.dynamics.collision import PLANE, collide
from graspforge.transmission import net_torque_kernel

NHAND = 5
MAX_CONTACTS = 48
MAX_VERTS = 8

# hand parameter slots
HP_LD, HP_LP, HP_LM, HP_HALF, HP_RAD, HP_GAMMA0, HP_RHO, HP_ARMATURE, HP_ENABLED, HP_PALM_H = range(10)
HP_SIZE = 10
# transmission parameter slots
(TP_RM, TP_rM, TP_RI, TP_rI, TP_KS, TP_TPT, TP_K, TP_KP, TP_KDD, TP_KE, TP_THEO,
 TP_THOFS, TP_XMAX, TP_XOFS, TP_MC) = range(15)
TP_SIZE = 15
# world parameter slots
WP_DT, WP_ITERS, WP_BETA, WP_SLOP, WP_G, WP_MARGIN, WP_VMAX, WP_ANG_SLOP, WP_PPASS = range(9)
WP_SIZE = 9
# contact report columns
(C_PX, C_PY, C_NX, C_NY, C_DEPTH, C_LN, C_LT, C_BELT, C_BELT_SPEED, C_GA, C_GB, C_MU,
 C_BTX, C_BTY) = range(14)
C_SIZE = 14
# info slots
I_XT, I_XS, I_TS, I_MODE, I_NC, I_STATUS, I_TC, I_CRAWL = range(8)
I_SIZE = 8

STATUS_OK = 0
STATUS_DIVERGED = 1


@numba.njit(cache=True)
def finger_sign(f):
    return 1.0 if f == 0 else -1.0


@numba.njit(cache=True)
def hand_frames(q, palm_y, hp, tp, frames):
    """Fill rows 0..4 of ``frames`` with (origin x, origin y, axis x, axis y)."""
    frames[0, 0] = 0.0
    frames[0, 1] = palm_y
    frames[0, 2] = 1.0
    frames[0, 3] = 0.0
    half_m = 0.5 * hp[HP_LM]
    for f in range(2):
        s = finger_sign(f)
        thM = q[2 * f]
        thI = q[2 * f + 1]
        gamma = hp[HP_GAMMA0] + thM
        upx = s * math.cos(gamma)
        upy = -math.sin(gamma)
        delta = thM + thI - tp[TP_THOFS]
        udx = -s * math.sin(delta)
        udy = -math.cos(delta)
        mpx = s * half_m
        mpy = palm_y
        ipx = mpx + hp[HP_LP] * upx
        ipy = mpy + hp[HP_LP] * upy
        lp = 1 + 2 * f
        frames[lp, 0] = mpx
        frames[lp, 1] = mpy
        frames[lp, 2] = upx
        frames[lp, 3] = upy
        frames[lp + 1, 0] = ipx
        frames[lp + 1, 1] = ipy
        frames[lp + 1, 2] = udx
        frames[lp + 1, 3] = udy


@numba.njit(cache=True)
def body_frames(q, nb, frames):
    for k in range(nb):
        b = NHAND + 3 * k
        frames[5 + k, 0] = q[b]
        frames[5 + k, 1] = q[b + 1]
        frames[5 + k, 2] = math.cos(q[b + 2])
        frames[5 + k, 3] = math.sin(q[b + 2])


@numba.njit(cache=True)
def geom_world(g, gtype, glink, gnv, gverts, frames, out):
    n = gnv[g]
    link = glink[g]
    if link < 0 or gtype[g] == PLANE:
        for i in range(n):
            out[i, 0] = gverts[g, i, 0]
            out[i, 1] = gverts[g, i, 1]
        return n
    ox = frames[link, 0]
    oy = frames[link, 1]
    ux = frames[link, 2]
    uy = frames[link, 3]
    for i in range(n):
        lx = gverts[g, i, 0]
        ly = gverts[g, i, 1]
        out[i, 0] = ox + lx * ux - ly * uy
        out[i, 1] = oy + lx * uy + ly * ux
    return n


@numba.njit(cache=True)
def add_point_jacobian(link, px, py, dx, dy, sign, row, frames, palm_vy):
    """row += sign * d . dv(p)/dv ; returns sign * d . (velocity not carried by dofs)."""
    if link < 0:
        return 0.0
    if link < NHAND:
        const = sign * dy * palm_vy
        if link == 0:
            return const
        f = (link - 1) // 2
        s = finger_sign(f)
        lp = 1 + 2 * f
        mx = frames[lp, 0]
        my = frames[lp, 1]
        # -s * perp(p - MP), perp(r) = (-r_y, r_x)
        row[2 * f] += sign * (-s) * (-dx * (py - my) + dy * (px - mx))
        if link == lp + 1:
            ix = frames[lp + 1, 0]
            iy = frames[lp + 1, 1]
            row[2 * f + 1] += sign * (-s) * (-dx * (py - iy) + dy * (px - ix))
        return const
    k = link - NHAND
    b = NHAND + 3 * k
    cx = frames[link, 0]
    cy = frames[link, 1]
    row[b] += sign * dx
    row[b + 1] += sign * dy
    row[b + 2] += sign * (-dx * (py - cy) + dy * (px - cx))
    return 0.0


@numba.njit(cache=True)
def finger_mass_and_gravity(f, frames, hp, g, M, grav):
    """2x2 joint-space inertia and gravity torques of finger ``f``."""
    s = finger_sign(f)
    lp = 1 + 2 * f
    rho = hp[HP_RHO]
    mx = frames[lp, 0]
    my = frames[lp, 1]
    ix = frames[lp + 1, 0]
    iy = frames[lp + 1, 1]
    l_p = hp[HP_LP]
    l_d = hp[HP_LD]
    m_p = rho * l_p
    m_d = rho * l_d
    i_p = m_p * l_p * l_p / 12.0
    i_d = m_d * l_d * l_d / 12.0
    cpx = mx + 0.5 * l_p * frames[lp, 2]
    cpy = my + 0.5 * l_p * frames[lp, 3]
    cdx = ix + 0.5 * l_d * frames[lp + 1, 2]
    cdy = iy + 0.5 * l_d * frames[lp + 1, 3]
    # linear Jacobian columns (x, y) of each COM
    jp_m_x = -s * (-(cpy - my))
    jp_m_y = -s * (cpx - mx)
    jd_m_x = -s * (-(cdy - my))
    jd_m_y = -s * (cdx - mx)
    jd_i_x = -s * (-(cdy - iy))
    jd_i_y = -s * (cdx - ix)
    M[0, 0] = m_p * (jp_m_x * jp_m_x + jp_m_y * jp_m_y) + i_p + m_d * (jd_m_x * jd_m_x + jd_m_y * jd_m_y) + i_d
    M[0, 1] = m_d * (jd_m_x * jd_i_x + jd_m_y * jd_i_y) + i_d
    M[1, 0] = M[0, 1]
    M[1, 1] = m_d * (jd_i_x * jd_i_x + jd_i_y * jd_i_y) + i_d
    M[0, 0] += hp[HP_ARMATURE]
    M[1, 1] += hp[HP_ARMATURE]
    grav[0] = -g * (m_p * jp_m_y + m_d * jd_m_y)
    grav[1] = -g * (m_d * jd_i_y)


@numba.njit(cache=True)
def _limit_row(J, bias, kind, partner, mu, r, n, dof_a, ca, dof_b, cb, gap, dt, beta, slop):
    for i in range(n):
        J[r, i] = 0.0
    J[r, dof_a] += ca
    if dof_b >= 0:
        J[r, dof_b] += cb
    if gap < 0.0:
        pen = -gap - slop
        bias[r] = -beta / dt * pen if pen > 0.0 else 0.0
    else:
        bias[r] = gap / dt
    kind[r] = 0
    partner[r] = -1
    mu[r] = 0.0
    return r + 1


@numba.njit(cache=True)
def project_positions(q, palm_y, hp, tp, gtype, glink, gnv, gverts, grad, pairs, Minv, slop, passes, hand_on):
    """Push remaining overlap beyond ``slop`` out at position level; returns the total correction."""
    n = q.shape[0]
    nb = (n - NHAND) // 3
    ng = gtype.shape[0]
    total = np.zeros(n)
    frames = np.zeros((NHAND + nb, 4))
    wverts = np.zeros((ng, MAX_VERTS, 2))
    scratch = np.zeros((8, 5))
    row = np.zeros(n)
    wrow = np.zeros(n)
    for _ in range(passes):
        if hand_on:
            hand_frames(q, palm_y, hp, tp, frames)
        body_frames(q, nb, frames)
        for gi in range(ng):
            if glink[gi] >= 0 and glink[gi] < NHAND and not hand_on:
                continue
            geom_world(gi, gtype, glink, gnv, gverts, frames, wverts[gi])
        dq = np.zeros(n)
        moved = False
        for p in range(pairs.shape[0]):
            ga = pairs[p, 0]
            gb = pairs[p, 1]
            la = glink[ga]
            lb = glink[gb]
            if not hand_on and ((la >= 0 and la < NHAND) or (lb >= 0 and lb < NHAND)):
                continue
            k = collide(gtype[ga], wverts[ga], gnv[ga], grad[ga], gtype[gb], wverts[gb], gnv[gb], grad[gb],
                        0.0, scratch)
            for c in range(k):
                depth = scratch[c, 4]
                if depth <= slop:
                    continue
                for i in range(n):
                    row[i] = 0.0
                px = scratch[c, 0]
                py = scratch[c, 1]
                nx = scratch[c, 2]
                ny = scratch[c, 3]
                add_point_jacobian(lb, px, py, nx, ny, 1.0, row, frames, 0.0)
                add_point_jacobian(la, px, py, nx, ny, -1.0, row, frames, 0.0)
                est = depth
                for i in range(n):
                    est -= row[i] * dq[i]
                err = est - slop
                if err <= 0.0:
                    continue
                keff = 0.0
                for i in range(n):
                    acc = 0.0
                    for j in range(n):
                        acc += Minv[i, j] * row[j]
                    wrow[i] = acc
                    keff += row[i] * acc
                if keff <= 1e-14:
                    continue
                lam = err / keff
                for i in range(n):
                    dq[i] += wrow[i] * lam
                moved = True
        if not moved:
            break
        for i in range(n):
            q[i] += dq[i]
            total[i] += dq[i]
    return total


@numba.njit(cache=True)
def step_kernel(q, v, palm, T_m, hp, tp, wp,
                gtype, glink, gnv, gverts, grad, gmu, gbelt, gbelt_speed, gmu_belt,
                pairs, pair_mu, bmass, binertia, fext, cout, info):
    dt = wp[WP_DT]
    iters = int(wp[WP_ITERS])
    beta = wp[WP_BETA]
    slop = wp[WP_SLOP]
    g = wp[WP_G]
    margin = wp[WP_MARGIN]
    n = q.shape[0]
    nb = (n - NHAND) // 3
    hand_on = hp[HP_ENABLED] > 0.5
    palm_vy = palm[1]

    frames = np.zeros((NHAND + nb, 4))
    if hand_on:
        hand_frames(q, palm[0], hp, tp, frames)
    body_frames(q, nb, frames)

    # ---- generalized forces and implicit hand block
    Minv = np.zeros((n, n))
    dv = np.zeros(n)
    x_t = 0.0
    x_s = 0.0
    T_s = 0.0
    mode = 1
    tau_c = 0.0
    if hand_on:
        (tM1, tI1, tM2, tI2, tc, x_t, x_s, T_s, mode, slope) = net_torque_kernel(
            q[0], q[1], q[2], q[3], q[4], v[0], v[1], v[2], v[3],
            tp[TP_RM], tp[TP_rM], tp[TP_RI], tp[TP_rI], tp[TP_KS], tp[TP_TPT],
            tp[TP_K], tp[TP_KP], tp[TP_KDD], tp[TP_KE], tp[TP_THEO], tp[TP_THOFS],
            tp[TP_XMAX], tp[TP_XOFS], T_m)
        tau_c = tc
        f = np.zeros(NHAND)
        f[0] = tM1
        f[1] = tI1
        f[2] = tM2
        f[3] = tI2
        f[4] = tc
        A = np.zeros((NHAND, NHAND))
        M2 = np.zeros((2, 2))
        gr = np.zeros(2)
        for fi in range(2):
            finger_mass_and_gravity(fi, frames, hp, g, M2, gr)
            A[2 * fi, 2 * fi] = M2[0, 0]
            A[2 * fi, 2 * fi + 1] = M2[0, 1]
            A[2 * fi + 1, 2 * fi] = M2[1, 0]
            A[2 * fi + 1, 2 * fi + 1] = M2[1, 1]
            f[2 * fi] += gr[0]
            f[2 * fi + 1] += gr[1]
        A[4, 4] = tp[TP_MC]
        for i in range(4):
            A[i, i] += dt * tp[TP_KDD]
        a = np.zeros(NHAND)
        a[2] = -tp[TP_rM]
        a[3] = tp[TP_rI]
        a[4] = 1.0
        av = 0.0
        for i in range(NHAND):
            av += a[i] * v[i]
        rhs = np.zeros(NHAND)
        for i in range(NHAND):
            for j in range(NHAND):
                A[i, j] += dt * dt * slope * a[i] * a[j]
            rhs[i] = dt * (f[i] - dt * slope * a[i] * av)
        Ainv = np.linalg.inv(A)
        for i in range(NHAND):
            s_ = 0.0
            for j in range(NHAND):
                Minv[i, j] = Ainv[i, j]
                s_ += Ainv[i, j] * rhs[j]
            dv[i] = s_
    for k in range(nb):
        b = NHAND + 3 * k
        Minv[b, b] = 1.0 / bmass[k]
        Minv[b + 1, b + 1] = 1.0 / bmass[k]
        Minv[b + 2, b + 2] = 1.0 / binertia[k]
        dv[b] = dt * fext[k, 0] / bmass[k]
        dv[b + 1] = dt * (fext[k, 1] / bmass[k] - g)
        dv[b + 2] = dt * fext[k, 2] / binertia[k]
    for i in range(n):
        v[i] += dv[i]

    # previous contacts for warm starting
    nprev = int(info[I_NC])
    prev = np.empty((nprev, C_SIZE))
    for c in range(nprev):
        for col in range(C_SIZE):
            prev[c, col] = cout[c, col]

    # ---- collision detection
    ng = gtype.shape[0]
    wverts = np.zeros((ng, MAX_VERTS, 2))
    for gi in range(ng):
        if glink[gi] >= 0 and glink[gi] < NHAND and not hand_on:
            continue
        geom_world(gi, gtype, glink, gnv, gverts, frames, wverts[gi])
    scratch = np.zeros((8, 5))
    nc = 0
    for p in range(pairs.shape[0]):
        ga = pairs[p, 0]
        gb = pairs[p, 1]
        la = glink[ga]
        lb = glink[gb]
        if not hand_on and ((la >= 0 and la < NHAND) or (lb >= 0 and lb < NHAND)):
            continue
        k = collide(gtype[ga], wverts[ga], gnv[ga], grad[ga], gtype[gb], wverts[gb], gnv[gb], grad[gb],
                    margin, scratch)
        for c in range(k):
            if nc >= MAX_CONTACTS:
                break
            for col in range(5):
                cout[nc, col] = scratch[c, col]
            cout[nc, C_GA] = ga
            cout[nc, C_GB] = gb
            cout[nc, C_MU] = pair_mu[p]
            cout[nc, C_BELT] = 0.0
            cout[nc, C_BELT_SPEED] = 0.0
            cout[nc, C_LN] = 0.0
            cout[nc, C_LT] = 0.0
            cout[nc, C_BTX] = 0.0
            cout[nc, C_BTY] = 0.0
            nc += 1

    # ---- constraint rows
    rmax = 2 * nc + 10
    J = np.zeros((rmax, n))
    const = np.zeros(rmax)
    bias = np.zeros(rmax)
    kind = np.zeros(rmax, np.int64)
    partner = np.zeros(rmax, np.int64)
    mu = np.zeros(rmax)
    r = 0
    for c in range(nc):
        ga = int(cout[c, C_GA])
        gb = int(cout[c, C_GB])
        la = glink[ga]
        lb = glink[gb]
        px = cout[c, C_PX]
        py = cout[c, C_PY]
        nx = cout[c, C_NX]
        ny = cout[c, C_NY]
        depth = cout[c, C_DEPTH]
        tx = -ny
        ty = nx
        # normal row
        ci = add_point_jacobian(lb, px, py, nx, ny, 1.0, J[r], frames, palm_vy)
        ci += add_point_jacobian(la, px, py, nx, ny, -1.0, J[r], frames, palm_vy)
        const[r] = ci
        if depth > 0.0:
            pen = depth - slop
            bias[r] = -beta / dt * pen if pen > 0.0 else 0.0
        else:
            bias[r] = -depth / dt
        kind[r] = 0
        partner[r] = -1
        rn = r
        r += 1
        # tangent row
        ct = add_point_jacobian(lb, px, py, tx, ty, 1.0, J[r], frames, palm_vy)
        ct += add_point_jacobian(la, px, py, tx, ty, -1.0, J[r], frames, palm_vy)
        mu_c = cout[c, C_MU]
        if gbelt[ga] == 1 and hand_on:
            # crawler belt on the inner face and tip of DP2
            ux = frames[la, 2]
            uy = frames[la, 3]
            s = finger_sign(1)
            inx = -s * (-uy)
            iny = -s * ux
            n_in = nx * inx + ny * iny
            n_ax = -(nx * ux + ny * uy)
            if n_in > -1e-6 and n_ax < 0.1:
                bx = inx * (-n_ax) + (-ux) * n_in
                by = iny * (-n_ax) + (-uy) * n_in
                bl = math.sqrt(bx * bx + by * by)
                if bl > 1e-9:
                    bx /= bl
                    by /= bl
                    J[r, 4] -= tx * bx + ty * by
                    mu_c = min(gmu_belt[ga], gmu[gb])
                    cout[c, C_BELT] = 1.0
                    cout[c, C_BELT_SPEED] = v[4]
                    cout[c, C_BTX] = bx
                    cout[c, C_BTY] = by
        elif gbelt[ga] == 2:
            sp = gbelt_speed[ga]
            ct -= (tx * ny - ty * nx) * sp
            mu_c = min(gmu_belt[ga], gmu[gb])
            cout[c, C_BELT] = 1.0
            cout[c, C_BELT_SPEED] = sp
            cout[c, C_BTX] = ny
            cout[c, C_BTY] = -nx
        cout[c, C_MU] = mu_c
        const[r] = ct
        bias[r] = 0.0
        kind[r] = 1
        partner[r] = rn
        mu[r] = mu_c
        r += 1

    if hand_on:
        ang_slop = wp[WP_ANG_SLOP]
        lim_margin = 0.2
        pi = math.pi
        for fi in range(2):
            dm = 2 * fi
            di = 2 * fi + 1
            gap = q[dm]
            if gap < lim_margin:
                r = _limit_row(J, bias, kind, partner, mu, r, n, dm, 1.0, -1, 0.0, gap, dt, beta, ang_slop)
            gap = pi - q[dm]
            if gap < lim_margin:
                r = _limit_row(J, bias, kind, partner, mu, r, n, dm, -1.0, -1, 0.0, gap, dt, beta, ang_slop)
            gap = q[di]
            if gap < lim_margin:
                r = _limit_row(J, bias, kind, partner, mu, r, n, di, 1.0, -1, 0.0, gap, dt, beta, ang_slop)
            gap = pi - q[di]
            if gap < lim_margin:
                r = _limit_row(J, bias, kind, partner, mu, r, n, di, -1.0, -1, 0.0, gap, dt, beta, ang_slop)
            gap = q[dm] + q[di] - tp[TP_THOFS]
            if gap < lim_margin:
                r = _limit_row(J, bias, kind, partner, mu, r, n, dm, 1.0, di, 1.0, gap, dt, beta, ang_slop)
    nrows = r

    # ---- projected Gauss-Seidel on velocities
    W = np.zeros((nrows, n))
    dinv = np.zeros(nrows)
    for rr in range(nrows):
        for i in range(n):
            acc = 0.0
            for j in range(n):
                acc += Minv[i, j] * J[rr, j]
            W[rr, i] = acc
        k_ = 0.0
        for i in range(n):
            k_ += J[rr, i] * W[rr, i]
        dinv[rr] = 1.0 / k_ if k_ > 1e-14 else 0.0
    lam = np.zeros(nrows)
    warm_radius = 2.0 * margin
    for c in range(nc):
        best = warm_radius * warm_radius
        hit = -1
        for pc in range(nprev):
            if prev[pc, C_GA] != cout[c, C_GA] or prev[pc, C_GB] != cout[c, C_GB]:
                continue
            dx = prev[pc, C_PX] - cout[c, C_PX]
            dy = prev[pc, C_PY] - cout[c, C_PY]
            d2 = dx * dx + dy * dy
            if d2 < best:
                best = d2
                hit = pc
        if hit >= 0:
            ln = prev[hit, C_LN]
            lt = prev[hit, C_LT]
            lim = mu[2 * c + 1] * ln
            lt = min(max(lt, -lim), lim)
            for rr, l0 in ((2 * c, ln), (2 * c + 1, lt)):
                if l0 != 0.0:
                    lam[rr] = l0
                    for i in range(n):
                        v[i] += W[rr, i] * l0
    for it in range(iters):
        for pas in range(2):
            for rr in range(nrows):
                if (kind[rr] == 1) != (pas == 1):
                    continue
                vr = const[rr]
                for i in range(n):
                    vr += J[rr, i] * v[i]
                if kind[rr] == 0:
                    new = lam[rr] - (vr + bias[rr]) * dinv[rr]
                    if new < 0.0:
                        new = 0.0
                else:
                    lim = mu[rr] * lam[partner[rr]]
                    new = lam[rr] - vr * dinv[rr]
                    if new > lim:
                        new = lim
                    elif new < -lim:
                        new = -lim
                d = new - lam[rr]
                if d != 0.0:
                    for i in range(n):
                        v[i] += W[rr, i] * d
                    lam[rr] = new

    for c in range(nc):
        cout[c, C_LN] = lam[2 * c]
        cout[c, C_LT] = lam[2 * c + 1]
        # linearized depth at the end of the step
        vn = const[2 * c]
        for i in range(n):
            vn += J[2 * c, i] * v[i]
        cout[c, C_DEPTH] -= dt * vn
    crawl = 0.0
    for rr in range(nrows):
        crawl += J[rr, 4] * lam[rr] if hand_on else 0.0

    # ---- integrate positions
    for i in range(n):
        q[i] += dt * v[i]
    palm[0] += dt * palm_vy
    passes = int(wp[WP_PPASS])
    if passes > 0:
        dq = project_positions(q, palm[0], hp, tp, gtype, glink, gnv, gverts, grad, pairs, Minv, slop,
                               passes, hand_on)
        for c in range(nc):
            corr = 0.0
            for i in range(n):
                corr += J[2 * c, i] * dq[i]
            cout[c, C_DEPTH] -= corr

    status = STATUS_OK
    vmax = wp[WP_VMAX]
    reach = hp[HP_LP] + hp[HP_LD]
    for i in range(n):
        if not math.isfinite(v[i]) or not math.isfinite(q[i]):
            status = STATUS_DIVERGED
    if hand_on:
        for i in range(4):
            if abs(v[i]) * reach > vmax:
                status = STATUS_DIVERGED
        if abs(v[4]) > vmax:
            status = STATUS_DIVERGED
    for k in range(nb):
        b = NHAND + 3 * k
        if math.sqrt(v[b] ** 2 + v[b + 1] ** 2) > vmax:
            status = STATUS_DIVERGED
    info[I_XT] = x_t
    info[I_XS] = x_s
    info[I_TS] = T_s
    info[I_MODE] = mode
    info[I_NC] = nc
    info[I_STATUS] = status
    info[I_TC] = tau_c
    info[I_CRAWL] = crawl
    return status


@numba.njit(cache=True)
def tip_height_kernel(q, palm_y, hp, tp, glink, gtype, gnv, gverts, grad):
    """Lowest point of the two distal links."""
    frames = np.zeros((NHAND, 4))
    hand_frames(q, palm_y, hp, tp, frames)
    out = np.zeros((MAX_VERTS, 2))
    low = 1e30
    for gi in range(glink.shape[0]):
        if glink[gi] == 2 or glink[gi] == 4:
            n = geom_world(gi, gtype, glink, gnv, gverts, frames, out)
            for i in range(n):
                y = out[i, 1] - grad[gi]
                if y < low:
                    low = y
    return low


@numba.njit(cache=True)
def contact_summary(cout, nc, glink, body_link):
    """(hand contacts, static contacts, squeeze impulse) touching ``body_link``."""
    n_hand = 0
    n_static = 0
    imp = 0.0
    for c in range(nc):
        if cout[c, C_DEPTH] < 0.0 and cout[c, C_LN] <= 0.0:
            continue
        la = glink[int(cout[c, C_GA])]
        lb = glink[int(cout[c, C_GB])]
        if lb != body_link:
            continue
        if la < 0:
            n_static += 1
        elif la < NHAND:
            n_hand += 1
            imp += cout[c, C_LN]
    return n_hand, n_static, imp
