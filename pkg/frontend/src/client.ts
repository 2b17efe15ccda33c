import { Annotation, AnnotationEvent, Label, Snapshot, VideoDescriptor } from './types';

export class ApiError extends Error {
    readonly status: number;
    readonly code: string;

    constructor(status: number, code: string, message: string) {
        super(message);
        this.name = 'ApiError';
        this.status = status;
        this.code = code;
    }
}

/** Thin typed wrapper over the REST surface, token-authenticated. */
export class ApiClient {
    constructor(
        private readonly baseUrl: string,
        private token: string | null = null,
    ) {}

    async login(email: string, password: string): Promise<void> {
        const body = await this.request<{ token: string }>('POST', '/auth/login', {
            email,
            password,
        });
        this.token = body.token;
    }

    get authToken(): string {
        if (this.token === null) {
            throw new Error('not logged in');
        }
        return this.token;
    }

    listVideos(params: Record<string, string> = {}): Promise<{
        items: VideoDescriptor[];
        total: number;
    }> {
        const query = new URLSearchParams(params).toString();
        return this.request('GET', `/videos${query ? '?' + query : ''}`);
    }

    listLabels(): Promise<Label[]> {
        return this.request('GET', '/labels');
    }

    createLabel(name: string, color: string, kind: string): Promise<Label> {
        return this.request('POST', '/labels', { name, color, kind });
    }

    listAnnotations(videoId: string, groupId?: string): Promise<Annotation[]> {
        const query = groupId ? `?groupId=${encodeURIComponent(groupId)}` : '';
        return this.request('GET', `/videos/${videoId}/annotations${query}`);
    }

    createAnnotation(draft: Record<string, unknown>): Promise<Annotation> {
        return this.request('POST', '/annotations', draft);
    }

    updateAnnotation(id: string, patch: Record<string, unknown>): Promise<Annotation> {
        return this.request('PATCH', `/annotations/${id}`, patch);
    }

    deleteAnnotation(id: string): Promise<void> {
        return this.request('DELETE', `/annotations/${id}`);
    }

    private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
        const headers: Record<string, string> = {};
        if (this.token !== null) {
            headers['Authorization'] = `Bearer ${this.token}`;
        }
        if (body !== undefined) {
            headers['Content-Type'] = 'application/json';
        }
        const resp = await fetch(`${this.baseUrl}/api/v1${path}`, {
            method,
            headers,
            body: body === undefined ? undefined : JSON.stringify(body),
        });
        if (!resp.ok) {
            let code = 'HttpError';
            let message = resp.statusText;
            try {
                const detail = (await resp.json()) as { error?: string; message?: string };
                code = detail.error ?? code;
                message = detail.message ?? message;
            } catch {
                // non-JSON error body, keep the status text
            }
            throw new ApiError(resp.status, code, message);
        }
        if (resp.status === 204) {
            return undefined as T;
        }
        return (await resp.json()) as T;
    }
}

/** The subset of the WebSocket interface the realtime client needs, so a
 *  browser socket, the `ws` package, or a test double all plug in. */
export interface SocketLike {
    send(data: string): void;
    close(): void;
    onmessage: ((event: { data: unknown }) => void) | null;
    onclose: ((event: { code: number }) => void) | null;
    onopen: (() => void) | null;
}

export interface RealtimeHandlers {
    onSnapshot: (snapshot: Snapshot) => void;
    onEvent: (event: AnnotationEvent) => void;
    /** Called when the server signals the client fell behind (close 4001). */
    onResyncRequired: () => void;
}

export class RealtimeClient {
    private socket: SocketLike | null = null;

    constructor(
        private readonly socketFactory: (url: string) => SocketLike,
        private readonly baseWsUrl: string,
        private readonly token: string,
        private readonly handlers: RealtimeHandlers,
    ) {}

    connect(): Promise<void> {
        const socket = this.socketFactory(`${this.baseWsUrl}/ws?token=${this.token}`);
        this.socket = socket;
        socket.onmessage = (event) => {
            const message = JSON.parse(String(event.data));
            if (message.type === 'snapshot') {
                this.handlers.onSnapshot(message as Snapshot);
            } else if (typeof message.type === 'string' && message.type.startsWith('annotation.')) {
                this.handlers.onEvent(message as AnnotationEvent);
            }
        };
        socket.onclose = (event) => {
            if (event.code === 4001) {
                this.handlers.onResyncRequired();
            }
        };
        return new Promise((resolve) => {
            socket.onopen = () => resolve();
        });
    }

    subscribe(videoId: string, groupId: string | null = null): void {
        this.send({ type: 'subscribe', videoId, groupId });
    }

    unsubscribe(videoId: string, groupId: string | null = null): void {
        this.send({ type: 'unsubscribe', videoId, groupId });
    }

    close(): void {
        this.socket?.close();
    }

    private send(message: Record<string, unknown>): void {
        if (this.socket === null) {
            throw new Error('not connected');
        }
        this.socket.send(JSON.stringify(message));
    }
}
