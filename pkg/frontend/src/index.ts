export * from './container';
export * from './manifest';
export * from './matfile';
export * from './png';
export * from './datasets';
export * from './checkpoint';
export * from './vae';
export * from './dmol';
