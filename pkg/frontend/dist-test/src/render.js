/**
 * Canvas rendering: 2.5D robot views (side + top), desired vs measured
 * contact traces, and the per-term reward strip. Stance feet are shaded.
 */
import { FOOT_NAMES, GEOM, legPoints, toWorld } from "./kinematics.js";
const FOOT_COLORS = ["#e05252", "#529ee0", "#52c77a", "#d8a62f"];
export function drawRobot(ctx, frame, view) {
    const W = ctx.canvas.width;
    const H = ctx.canvas.height;
    ctx.clearRect(0, 0, W, H);
    const scale = 220;
    const cx = W / 2;
    const cy = view === "side" ? H - 30 : H / 2;
    const base = frame.base_pos;
    const quat = frame.base_quat;
    const proj = (p) => {
        const rel = [p[0] - base[0], p[1] - base[1], p[2]];
        return view === "side"
            ? [cx + rel[0] * scale, cy - rel[2] * scale]
            : [cx + rel[0] * scale, cy + rel[1] * scale];
    };
    if (view === "side") {
        ctx.strokeStyle = "#666";
        ctx.beginPath();
        ctx.moveTo(0, cy);
        ctx.lineTo(W, cy);
        ctx.stroke();
    }
    // torso box
    const half = { x: GEOM.torso.x / 2, y: GEOM.torso.y / 2, z: GEOM.torso.z / 2 };
    const corners = view === "side"
        ? [
            [half.x, 0, half.z],
            [half.x, 0, -half.z],
            [-half.x, 0, -half.z],
            [-half.x, 0, half.z],
        ]
        : [
            [half.x, half.y, 0],
            [half.x, -half.y, 0],
            [-half.x, -half.y, 0],
            [-half.x, half.y, 0],
        ];
    ctx.strokeStyle = "#ddd";
    ctx.fillStyle = "#2a2f3a";
    ctx.beginPath();
    corners.forEach((c, i) => {
        const [px, py] = proj(toWorld(c, base, quat));
        if (i === 0)
            ctx.moveTo(px, py);
        else
            ctx.lineTo(px, py);
    });
    ctx.closePath();
    ctx.fill();
    ctx.stroke();
    // legs
    for (let i = 0; i < 4; i++) {
        const pts = legPoints(i, frame.q[3 * i], frame.q[3 * i + 1], frame.q[3 * i + 2]);
        const hip = proj(toWorld(pts.hip, base, quat));
        const knee = proj(toWorld(pts.knee, base, quat));
        const foot = proj(toWorld(pts.foot, base, quat));
        ctx.strokeStyle = FOOT_COLORS[i];
        ctx.lineWidth = 2.5;
        ctx.beginPath();
        ctx.moveTo(hip[0], hip[1]);
        ctx.lineTo(knee[0], knee[1]);
        ctx.lineTo(foot[0], foot[1]);
        ctx.stroke();
        ctx.lineWidth = 1;
        // stance feet highlighted (filled)
        ctx.beginPath();
        ctx.arc(foot[0], foot[1], frame.foot_contact[i] ? 6 : 3, 0, 2 * Math.PI);
        ctx.fillStyle = frame.foot_contact[i] ? FOOT_COLORS[i] : "#1c1f27";
        ctx.strokeStyle = FOOT_COLORS[i];
        ctx.fill();
        ctx.stroke();
    }
    ctx.fillStyle = "#aab";
    ctx.font = "11px monospace";
    ctx.fillText(`${view} view  h=${base[2].toFixed(3)} m  t=${frame.t.toFixed(2)} s`, 8, 14);
}
export function drawContactTraces(ctx, traces, horizonS) {
    const W = ctx.canvas.width;
    const H = ctx.canvas.height;
    ctx.clearRect(0, 0, W, H);
    if (traces.length === 0)
        return;
    const t1 = traces[traces.length - 1].t;
    const t0 = t1 - horizonS;
    const rowH = H / 4;
    for (let foot = 0; foot < 4; foot++) {
        const y0 = foot * rowH;
        // desired contact as shaded band height, measured as solid blocks
        ctx.fillStyle = "#30384a";
        for (const p of traces) {
            const x = ((p.t - t0) / horizonS) * W;
            const h = p.desired[foot] * (rowH - 6);
            ctx.fillRect(x, y0 + rowH - 3 - h, Math.max(2, W / traces.length), h);
        }
        ctx.fillStyle = FOOT_COLORS[foot];
        for (const p of traces) {
            if (!p.measured[foot])
                continue;
            const x = ((p.t - t0) / horizonS) * W;
            ctx.fillRect(x, y0 + rowH - 9, Math.max(2, W / traces.length), 6);
        }
        ctx.fillStyle = "#99a";
        ctx.font = "10px monospace";
        ctx.fillText(FOOT_NAMES[foot], 4, y0 + 11);
    }
}
export function drawRewardStrip(el, frame) {
    const entries = Object.entries(frame.rewards);
    entries.sort((a, b) => a[1] - b[1]);
    const rows = entries
        .map(([k, v]) => {
        const width = Math.min(100, Math.abs(v) * 2500);
        const color = v >= 0 ? "#52c77a" : "#e05252";
        return `<div class="rw"><span class="rk">${k}</span><span class="rb" style="width:${width}px;background:${color}"></span><span class="rv">${v.toFixed(5)}</span></div>`;
    })
        .join("");
    el.innerHTML = `<div class="rw total"><span class="rk">total</span><span class="rv">${frame.reward_total.toFixed(6)}</span></div>` + rows;
}
