'use strict';

const moment = require('moment');
const utils = require('./utils/util_a');

utils.setup();
console.log(moment.format(new Date(), 'short'));
