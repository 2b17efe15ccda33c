export * from './types';
export * from './interpolate';
export * from './timeline';
export * from './pending';
export * from './sync';
export * from './client';
