import { Annotation, AnnotationEvent, Snapshot } from './types';

/**
 * Client-side replica of one (video, group) channel. Events must be applied
 * in seq order; a gap means events were missed (or the server closed with
 * code 4001) and the replica must be rebuilt from a fresh snapshot.
 */
export interface LocalState {
    annotations: Map<string, Annotation>;
    lastSeq: number;
    selectedId: string | null;
}

export interface ApplyResult {
    state: LocalState;
    resyncRequired: boolean;
}

export function emptyState(): LocalState {
    return { annotations: new Map(), lastSeq: 0, selectedId: null };
}

export function applySnapshot(snapshot: Snapshot, selectedId: string | null = null): LocalState {
    const annotations = new Map<string, Annotation>();
    for (const ann of snapshot.annotations) {
        annotations.set(ann.id, stripAdvisory(ann));
    }
    return {
        annotations,
        lastSeq: snapshot.seq,
        selectedId: selectedId !== null && annotations.has(selectedId) ? selectedId : null,
    };
}

/**
 * Fold one remote event into the replica. Upserts are idempotent by id, so
 * an echo of the client's own optimistic create reconciles cleanly. A seq
 * gap leaves the state untouched and reports that a resync is needed.
 */
export function applyRemoteEvent(state: LocalState, event: AnnotationEvent): ApplyResult {
    if (event.seq !== state.lastSeq + 1) {
        return { state, resyncRequired: true };
    }
    const annotations = new Map(state.annotations);
    let selectedId = state.selectedId;
    if (event.type === 'annotation.deleted') {
        const id = event.payload.id as string;
        annotations.delete(id);
        if (selectedId === id) {
            selectedId = null;
        }
    } else {
        const ann = stripAdvisory(event.payload as unknown as Annotation);
        annotations.set(ann.id, ann);
    }
    return {
        state: { annotations, lastSeq: event.seq, selectedId },
        resyncRequired: false,
    };
}

/** Occurrence numbers are advisory and recomputed server-side; drop them so
 *  snapshot state and event-folded state compare equal. */
function stripAdvisory(ann: Annotation): Annotation {
    const { occurrence: _occurrence, ...rest } = ann;
    return rest as Annotation;
}
