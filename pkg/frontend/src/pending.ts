import { Label } from './types';

/**
 * State machine for the annotation being authored. The start time is taken
 * from the time cursor when the user presses "start"; the stop time must be
 * validated by moving the cursor and pressing "stop". Spatial (structure)
 * labels then require a first bounding box before the annotation exists.
 */
export type PendingState = 'AWAITING_STOP' | 'AWAITING_FIRST_BOX';

export interface PendingAnnotation {
    labelId: string;
    labelKind: Label['kind'];
    startMs: number;
    state: PendingState;
}

export interface CreateRequest {
    labelId: string;
    startMs: number;
    durationMs: number;
}

export type FinishResult =
    | { kind: 'request'; request: CreateRequest }
    | { kind: 'await-box'; pending: PendingAnnotation; request: CreateRequest }
    | { kind: 'invalid'; message: string };

/** Begin annotating; at most one pending annotation may exist at a time. */
export function beginAnnotation(
    current: PendingAnnotation | null,
    label: Label,
    cursorMs: number,
): PendingAnnotation {
    if (current !== null) {
        throw new Error('an annotation is already in progress');
    }
    return { labelId: label.id, labelKind: label.kind, startMs: cursorMs, state: 'AWAITING_STOP' };
}

/**
 * Validate the stop position. Temporal labels yield the create request
 * directly; structure labels transition to box-drawing mode, and the create
 * request is sent once the first box is drawn (see finishFirstBox).
 */
export function finishTemporalAnnotation(
    pending: PendingAnnotation,
    cursorMs: number,
): FinishResult {
    if (pending.state !== 'AWAITING_STOP') {
        return { kind: 'invalid', message: 'annotation is waiting for its first box' };
    }
    if (cursorMs <= pending.startMs) {
        return { kind: 'invalid', message: 'stop time must be after the start time' };
    }
    const request = {
        labelId: pending.labelId,
        startMs: pending.startMs,
        durationMs: cursorMs - pending.startMs,
    };
    if (pending.labelKind === 'structure') {
        return { kind: 'await-box', pending: { ...pending, state: 'AWAITING_FIRST_BOX' }, request };
    }
    return { kind: 'request', request };
}
