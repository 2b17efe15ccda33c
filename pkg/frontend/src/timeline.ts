import { Annotation, Label } from './types';

/** Width in pixels of the label-name column on the left of the timeline. */
export const SIDEBAR_WIDTH_PX = 160;

export interface TimelineViewState {
    /** Milliseconds of video represented by one horizontal pixel. */
    zoomLevel: number;
    /** Leftmost visible instant, in milliseconds. */
    horizontalOffset: number;
    /** Index of the first visible label row. */
    verticalOffset: number;
    sidebarVisible: boolean;
}

export interface TimelineBar {
    annotationId: string;
    /** Horizontal position in pixels, relative to the timeline area. */
    x: number;
    width: number;
    clipped: boolean;
}

export interface TimelineRow {
    labelId: string;
    labelName: string;
    color: string;
    bars: TimelineBar[];
}

export interface TimelineLayout {
    rows: TimelineRow[];
    /** Pixel width available for bars once the sidebar is accounted for. */
    timelineWidth: number;
    sidebarWidth: number;
}

export function defaultViewState(): TimelineViewState {
    return { zoomLevel: 100, horizontalOffset: 0, verticalOffset: 0, sidebarVisible: true };
}

export function toggleSidebar(view: TimelineViewState): TimelineViewState {
    return { ...view, sidebarVisible: !view.sidebarVisible };
}

/** Clamp pan/scroll offsets to the content bounds and keep zoom positive. */
export function clampView(
    view: TimelineViewState,
    durationMs: number,
    rowCount: number,
): TimelineViewState {
    return {
        zoomLevel: Math.max(view.zoomLevel, 1e-6),
        horizontalOffset: Math.min(Math.max(view.horizontalOffset, 0), Math.max(durationMs, 0)),
        verticalOffset: Math.min(Math.max(view.verticalOffset, 0), Math.max(rowCount - 1, 0)),
        sidebarVisible: view.sidebarVisible,
    };
}

/**
 * Pure layout: one row per label (in the given label order), bars positioned
 * with x = (startMs - horizontalOffset) / zoomLevel and width =
 * durationMs / zoomLevel, clipped to [0, viewportWidth]. Bars that would
 * touch are trimmed so a 1 px gap always separates them; every visible bar
 * keeps at least 1 px of width.
 */
export function layoutTimeline(
    annotations: Annotation[],
    labels: Label[],
    view: TimelineViewState,
    viewportWidth: number,
): TimelineLayout {
    const sidebarWidth = view.sidebarVisible ? SIDEBAR_WIDTH_PX : 0;
    const timelineWidth = Math.max(viewportWidth - sidebarWidth, 0);
    const byLabel = new Map<string, Annotation[]>();
    for (const ann of annotations) {
        const bucket = byLabel.get(ann.labelId);
        if (bucket) {
            bucket.push(ann);
        } else {
            byLabel.set(ann.labelId, [ann]);
        }
    }
    const rows: TimelineRow[] = [];
    for (const label of labels) {
        const anns = byLabel.get(label.id) ?? [];
        if (anns.length === 0) {
            continue;
        }
        anns.sort((a, b) => a.startMs - b.startMs || a.createdSeq - b.createdSeq);
        const bars: TimelineBar[] = [];
        for (const ann of anns) {
            const rawX = (ann.startMs - view.horizontalOffset) / view.zoomLevel;
            const rawWidth = ann.durationMs / view.zoomLevel;
            const x = Math.max(rawX, 0);
            const right = Math.min(rawX + rawWidth, timelineWidth);
            if (right <= 0 || x >= timelineWidth) {
                continue;
            }
            const bar: TimelineBar = {
                annotationId: ann.id,
                x,
                width: Math.max(right - x, 1),
                clipped: rawX < 0 || rawX + rawWidth > timelineWidth,
            };
            const prev = bars[bars.length - 1];
            if (prev && bar.x < prev.x + prev.width + 1) {
                // never let adjacent bars merge visually
                prev.width = Math.max(bar.x - prev.x - 1, 1);
            }
            bars.push(bar);
        }
        if (bars.length > 0) {
            rows.push({ labelId: label.id, labelName: label.name, color: label.color, bars });
        }
    }
    return { rows, timelineWidth, sidebarWidth };
}
