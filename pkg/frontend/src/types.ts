/** Wire types mirroring the REST and websocket contracts of the backend. */

export type LabelKind = 'phase' | 'action' | 'event' | 'structure';

export interface Label {
    id: string;
    name: string;
    color: string;
    kind: LabelKind;
    version?: number;
}

export interface BoundingBox {
    x: number;
    y: number;
    w: number;
    h: number;
}

export interface Keyframe extends BoundingBox {
    ts: number;
}

export interface BoxTrack {
    interpolation: 'linear';
    keyframes: Keyframe[];
}

export interface Annotation {
    id: string;
    videoId: string;
    labelId: string;
    startMs: number;
    durationMs: number;
    isFalsePositive: boolean;
    createdBy: string;
    groupId: string | null;
    showLabelOnViewer: boolean;
    createdSeq: number;
    track: BoxTrack | null;
    version: number;
    occurrence?: number;
}

export type AnnotationEventType =
    | 'annotation.created'
    | 'annotation.updated'
    | 'annotation.deleted';

export interface AnnotationEvent {
    type: AnnotationEventType;
    seq: number;
    videoId: string;
    groupId: string | null;
    payload: Record<string, unknown>;
    originUserId: string;
}

export interface Snapshot {
    type: 'snapshot';
    seq: number;
    videoId: string;
    groupId: string | null;
    annotations: Annotation[];
}

export interface VideoDescriptor {
    id: string;
    name: string;
    durationMs: number;
    frameRate: number;
    width: number;
    height: number;
    status: string;
}
