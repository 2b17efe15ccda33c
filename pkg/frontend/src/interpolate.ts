import { BoundingBox, BoxTrack } from './types';

/**
 * Box displayed at time t. This is the same formula the server uses, so the
 * overlay never disagrees with an export or another client: exact keyframe
 * boxes at keyframe timestamps, linear interpolation between neighbours,
 * clamping to the first/last keyframe outside the covered range.
 */
export function interpolateBox(track: BoxTrack, t: number): BoundingBox {
    const kfs = track.keyframes;
    if (kfs.length === 0) {
        throw new Error('track has no keyframes');
    }
    if (t <= kfs[0].ts) {
        return boxOf(kfs[0]);
    }
    const last = kfs[kfs.length - 1];
    if (t >= last.ts) {
        return boxOf(last);
    }
    let hi = 1;
    while (kfs[hi].ts < t) {
        hi += 1;
    }
    const k0 = kfs[hi - 1];
    const k1 = kfs[hi];
    if (t === k0.ts) {
        return boxOf(k0);
    }
    if (t === k1.ts) {
        return boxOf(k1);
    }
    const f = (t - k0.ts) / (k1.ts - k0.ts);
    return {
        x: k0.x + f * (k1.x - k0.x),
        y: k0.y + f * (k1.y - k0.y),
        w: k0.w + f * (k1.w - k0.w),
        h: k0.h + f * (k1.h - k0.h),
    };
}

function boxOf(kf: BoundingBox): BoundingBox {
    return { x: kf.x, y: kf.y, w: kf.w, h: kf.h };
}
