import { describe, expect, it } from 'vitest';

import { beginAnnotation, finishTemporalAnnotation } from '../src/pending';
import { Label } from '../src/types';

const phase: Label = { id: 'l1', name: 'preparation', color: '#336699', kind: 'phase' };
const structure: Label = { id: 'l2', name: 'grasper', color: '#cc2200', kind: 'structure' };

describe('pending annotation state machine', () => {
    it('takes the start time from the cursor', () => {
        const pending = beginAnnotation(null, phase, 2000);
        expect(pending.startMs).toBe(2000);
        expect(pending.state).toBe('AWAITING_STOP');
    });

    it('allows only one pending annotation at a time', () => {
        const pending = beginAnnotation(null, phase, 0);
        expect(() => beginAnnotation(pending, phase, 100)).toThrow(/already in progress/);
    });

    it('derives the duration from the stop cursor', () => {
        const pending = beginAnnotation(null, phase, 2000);
        const result = finishTemporalAnnotation(pending, 5000);
        expect(result).toEqual({
            kind: 'request',
            request: { labelId: 'l1', startMs: 2000, durationMs: 3000 },
        });
    });

    it('rejects a stop cursor at or before the start, with no request', () => {
        const pending = beginAnnotation(null, phase, 2000);
        expect(finishTemporalAnnotation(pending, 2000).kind).toBe('invalid');
        expect(finishTemporalAnnotation(pending, 1500).kind).toBe('invalid');
    });

    it('structure labels transition to box drawing instead of posting', () => {
        const pending = beginAnnotation(null, structure, 1000);
        const result = finishTemporalAnnotation(pending, 4000);
        expect(result.kind).toBe('await-box');
        if (result.kind === 'await-box') {
            expect(result.pending.state).toBe('AWAITING_FIRST_BOX');
            expect(result.request.durationMs).toBe(3000);
        }
    });
});
